#include "apxgrp/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace apxgrp {

namespace {

std::string trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c); };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

void parse_block(std::istream& in, ConfigNode& node, int depth) {
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line == "}") {
            if (depth == 0) throw ConfigError("unmatched '}' in config");
            return;
        }
        if (line.back() == '{') {
            std::string name = trim(line.substr(0, line.size() - 1));
            if (name.empty() || name.find('=') != std::string::npos) throw ConfigError("malformed block header '" + line + "'");
            if (node.blocks.count(name)) throw ConfigError("duplicate block '" + name + "'");
            parse_block(in, node.blocks[name], depth + 1);
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value' or 'block {', got '" + line + "'");
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("empty key in config line '" + line + "'");
        if (node.values.count(key)) throw ConfigError("duplicate key '" + key + "'");
        node.values[key] = val;
    }
    if (depth != 0) throw ConfigError("unterminated block in config");
}

std::uint64_t to_u64(const std::string& key, const std::string& val) {
    try {
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(val, &pos);
        if (pos != val.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key '" + key + "' expects an unsigned integer, got '" + val + "'");
    }
}

std::int64_t to_i64(const std::string& key, const std::string& val) {
    try {
        std::size_t pos = 0;
        std::int64_t v = std::stoll(val, &pos);
        if (pos != val.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("key '" + key + "' expects an integer, got '" + val + "'");
    }
}

bool to_bool(const std::string& key, const std::string& val) {
    if (val == "on" || val == "true" || val == "1") return true;
    if (val == "off" || val == "false" || val == "0") return false;
    throw ConfigError("key '" + key + "' expects on/off, got '" + val + "'");
}

void reject_unknown(const ConfigNode& node, const std::set<std::string>& value_keys,
                    const std::set<std::string>& block_keys, const std::string& where) {
    for (const auto& [k, _] : node.values)
        if (!value_keys.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
    for (const auto& [k, _] : node.blocks)
        if (!block_keys.count(k)) throw ConfigError("unknown block '" + k + "' in " + where);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

CtxPtr backend_from_node(const ConfigNode& b) {
    reject_unknown(b, {"kind", "d", "n", "p", "gens", "rules", "maxlen", "exponent"}, {}, "backend block");
    const std::string* kind = b.find("kind");
    if (!kind) throw ConfigError("backend block needs a 'kind' key");
    CtxPtr ctx;
    if (*kind == "int-lattice") {
        ctx = GroupCtx::integer_lattice(static_cast<int>(to_u64("d", b.get("d", "1"))));
    } else if (*kind == "mod-lattice") {
        ctx = GroupCtx::mod_lattice(to_u64("n", b.get("n", "0")), static_cast<int>(to_u64("d", b.get("d", "1"))));
    } else if (*kind == "symmetric") {
        ctx = GroupCtx::symmetric(static_cast<int>(to_u64("n", b.get("n", "0"))));
    } else if (*kind == "sl2") {
        ctx = GroupCtx::sl2(to_u64("p", b.get("p", "0")));
    } else if (*kind == "gl2") {
        ctx = GroupCtx::gl2(to_u64("p", b.get("p", "0")));
    } else if (*kind == "heisenberg") {
        ctx = GroupCtx::heisenberg();
    } else if (*kind == "cayley") {
        CayleyPresentation pres;
        pres.gens = b.get("gens", "");
        pres.max_word = to_u64("maxlen", b.get("maxlen", "32"));
        for (const auto& rule : split(b.get("rules", ""), ';')) {
            auto arrow = rule.find("->");
            if (arrow == std::string::npos) throw ConfigError("cayley rule must look like lhs->rhs");
            std::string rhs = trim(rule.substr(arrow + 2));
            pres.rules.push_back({trim(rule.substr(0, arrow)), rhs == "1" ? "" : rhs});
        }
        ctx = GroupCtx::cayley(std::move(pres));
    } else {
        throw ConfigError("unknown backend kind '" + *kind + "'");
    }
    if (const std::string* exp = b.find("exponent")) ctx = GroupCtx::with_exponent(ctx, to_u64("exponent", *exp));
    return ctx;
}

FamilyKind family_kind_from(const std::string& name) {
    if (name == "interval-box") return FamilyKind::IntervalBox;
    if (name == "beatty") return FamilyKind::Beatty;
    if (name == "heisenberg-box") return FamilyKind::HeisenbergBox;
    if (name == "cayley-ball") return FamilyKind::CayleyBall;
    if (name == "random-symmetric") return FamilyKind::RandomSymmetric;
    if (name == "subgroup-plus-noise") return FamilyKind::SubgroupPlusNoise;
    if (name == "exponent-grid") return FamilyKind::ExponentGrid;
    throw ConfigError("unknown family '" + name + "'");
}

InputSpec input_from_node(const ConfigNode& node, const CtxPtr& backend) {
    reject_unknown(node,
                   {"family", "file", "n", "d", "alpha", "r", "radius", "gens", "size", "seed", "basis", "noise",
                    "shifts", "symmetrized"},
                   {}, "input block");
    InputSpec in;
    const std::string* family = node.find("family");
    const std::string* file = node.find("file");
    if ((family == nullptr) == (file == nullptr))
        throw ConfigError("input block needs exactly one of 'family' or 'file'");
    if (file) {
        in.file = *file;
        return in;
    }
    FamilySpec spec;
    spec.kind = family_kind_from(*family);
    spec.ctx = backend;
    spec.d = static_cast<int>(to_u64("d", node.get("d", "1")));
    spec.n = to_i64("n", node.get("n", "0"));
    spec.alpha = node.get("alpha", "");
    spec.r = to_i64("r", node.get("r", "0"));
    spec.radius = to_u64("radius", node.get("radius", "0"));
    spec.gens = split(node.get("gens", ""), '|');
    spec.size = to_u64("size", node.get("size", "0"));
    spec.seed = to_u64("seed", node.get("seed", "0"));
    spec.basis = static_cast<int>(to_u64("basis", node.get("basis", "0")));
    spec.noise = static_cast<int>(to_u64("noise", node.get("noise", "0")));
    spec.shifts = static_cast<int>(to_u64("shifts", node.get("shifts", "0")));
    spec.symmetrized = to_bool("symmetrized", node.get("symmetrized", "off"));
    in.family = std::move(spec);
    return in;
}

const std::map<std::string, std::set<std::string>>& command_flags() {
    static const std::map<std::string, std::set<std::string>> table = {
        {"tripling", {}},
        {"cover", {"side", "target"}},
        {"commens", {"other_file", "budget"}},
        {"approx-k", {}},
        {"tower", {"depth", "all_m"}},
        {"seed-search", {"family", "budget"}},
        {"closure", {"max_size"}},
        {"near-subgroup", {}},
        {"perfectness", {"l", "m", "samples"}},
        {"word-depth", {"a", "n_max", "inverses"}},
        {"freiman", {"e_budget"}},
        {"dimcmp", {"epsilon", "varieties"}},
        {"dichotomy", {"p_bound"}},
        {"gen", {}},
        {"corpus-run", {"corpus"}},
    };
    return table;
}

}  // namespace

const std::string* ConfigNode::find(const std::string& key) const {
    auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
}

std::string ConfigNode::get(const std::string& key, const std::string& fallback) const {
    const std::string* v = find(key);
    return v ? *v : fallback;
}

ConfigNode parse_config_text(std::string_view text) {
    std::istringstream is{std::string(text)};
    ConfigNode root;
    parse_block(is, root, 0);
    return root;
}

const std::vector<std::string>& known_commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, _] : command_flags()) v.push_back(name);
        return v;
    }();
    return names;
}

RunConfig RunConfig::parse(std::string_view text) {
    ConfigNode root = parse_config_text(text);
    reject_unknown(root, {"seed", "threads"}, {"backend", "input", "command", "output"}, "top level");

    RunConfig cfg;
    cfg.text = std::string(text);
    if (const std::string* s = root.find("seed")) cfg.seed = to_u64("seed", *s);
    if (const std::string* t = root.find("threads")) cfg.threads = static_cast<unsigned>(to_u64("threads", *t));

    if (auto it = root.blocks.find("backend"); it != root.blocks.end()) cfg.backend = backend_from_node(it->second);

    auto cit = root.blocks.find("command");
    if (cit == root.blocks.end()) throw ConfigError("config needs a command block");
    const ConfigNode& cnode = cit->second;
    const std::string* cname = cnode.find("name");
    if (!cname) throw ConfigError("command block needs a 'name' key");
    auto flags_it = command_flags().find(*cname);
    if (flags_it == command_flags().end()) throw ConfigError("unknown command '" + *cname + "'");
    {
        std::set<std::string> allowed = flags_it->second;
        allowed.insert("name");
        reject_unknown(cnode, allowed, {}, "command block");
    }
    cfg.command.name = *cname;
    for (const auto& [k, v] : cnode.values)
        if (k != "name") cfg.command.flags[k] = v;

    if (auto it = root.blocks.find("input"); it != root.blocks.end()) {
        cfg.input = input_from_node(it->second, cfg.backend);
    } else if (cfg.command.name != "corpus-run") {
        throw ConfigError("config needs an input block (except for corpus-run)");
    }

    if (auto it = root.blocks.find("output"); it != root.blocks.end()) {
        reject_unknown(it->second, {"dir", "formats", "cache"}, {}, "output block");
        cfg.output.dir = it->second.get("dir", "out");
        std::string formats = it->second.get("formats", "csv,json");
        cfg.output.csv = formats.find("csv") != std::string::npos;
        cfg.output.json = formats.find("json") != std::string::npos;
        cfg.output.cache = to_bool("cache", it->second.get("cache", "off"));
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

}  // namespace apxgrp
