#include <cstdio>

int main() {
    std::puts("qloop: CLI not wired up yet");
    return 2;
}
