#include "pkns/cli.hpp"

int main(int argc, char** argv) {
    return pkns::cli_main(argc, argv);
}
