#pragma once

#include <string>
#include <vector>

namespace nlcorpus::cli {

// Runs one pipeline command; args exclude the program name. Exit codes:
// 0 success, 1 usage/config error, 2 data error.
int run(const std::vector<std::string>& args);

} // namespace nlcorpus::cli
