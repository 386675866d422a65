#include <agentprint/cli.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    return agentprint::run_cli(argc, argv, std::cout, std::cerr);
}
