#include <string>
#include <vector>

#include "nlcorpus/cli.hpp"

int main(int argc, char** argv) {
    return nlcorpus::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
