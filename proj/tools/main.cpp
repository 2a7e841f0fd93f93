#include "kraken/cli.hpp"

int main(int argc, char **argv)
{
    return kraken::cli::cli_main(argc, argv);
}
