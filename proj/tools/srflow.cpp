// Placeholder CLI; full subcommands wired once the modules land.
#include <cstdio>
int main() { std::puts("srflow"); return 0; }
