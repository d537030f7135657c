#include <cstdio>

int main() {
    std::puts("gstpinn: CLI not wired up yet");
    return 2;
}
