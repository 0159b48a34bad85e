// config.hpp — TOML-subset configuration for sweeps
//
// Supported grammar: [section] headers, key = value lines, # comments,
// scalars (number, bool, "string") and flat homogeneous arrays. Unknown
// sections or keys are reported as errors, not ignored.
#pragma once

#include "jcm/sweep.hpp"

#include <map>
#include <string>
#include <vector>

namespace jcm {

struct TomlValue {
    enum class Type { Number, Bool, String, NumberArray, StringArray };
    Type type = Type::Number;
    double number = 0;
    bool boolean = false;
    std::string string;
    std::vector<double> numbers;
    std::vector<std::string> strings;
};

using TomlSection = std::map<std::string, TomlValue>;
using TomlTable = std::map<std::string, TomlSection>;

TomlTable parse_toml(const std::string& text);

SweepSpec parse_spec_toml(const std::string& text);
SweepSpec load_spec_file(const std::string& path);
std::string spec_to_toml(const SweepSpec& spec);

}  // namespace jcm
