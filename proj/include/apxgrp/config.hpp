#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "apxgrp/families.hpp"
#include "apxgrp/group.hpp"

namespace apxgrp {

// Parsed key/value block tree of the config text format:
//   key = value
//   block { ... }      (# starts a comment)
struct ConfigNode {
    std::map<std::string, std::string> values;
    std::map<std::string, ConfigNode> blocks;

    const std::string* find(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
};

ConfigNode parse_config_text(std::string_view text);

struct OutputSpec {
    std::string dir = "out";
    bool csv = true;
    bool json = true;
    bool cache = false;
};

struct InputSpec {
    std::optional<FamilySpec> family;
    std::string file;  // serialized FinSet path (exclusive with family)
};

struct CommandSpec {
    std::string name;
    std::map<std::string, std::string> flags;
};

// Validated run description.  Unknown keys anywhere are hard errors.
struct RunConfig {
    CtxPtr backend;  // may be implied by the family or the input file
    InputSpec input;
    CommandSpec command;
    OutputSpec output;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string text;  // canonical original text, echoed into reports

    static RunConfig parse(std::string_view text);
    static RunConfig parse_file(const std::string& path);
};

// Names accepted by command.name.
const std::vector<std::string>& known_commands();

}  // namespace apxgrp
