#include <string>
#include <vector>

#include "ostop/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ostop::cli::run_main(args);
}
