// CLI entry point; subcommands wrap the pipeline stages one-to-one.

#include <cstdio>

int main(int argc, char** argv) {
    (void)argc;
    (void)argv;
    std::puts("gait: not wired yet");
    return 1;
}
