#include "apxgrp/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "apxgrp/covering.hpp"
#include "apxgrp/dimcmp.hpp"
#include "apxgrp/parallel.hpp"
#include "apxgrp/probes.hpp"
#include "apxgrp/tower.hpp"

namespace apxgrp {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// --- CSV (RFC 4180) ---------------------------------------------------------

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    out += "\r\n";
    return out;
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::string fmt_ratio(const Ratio& r) { return fmt_double(r.value()); }

// --- input materialization ---------------------------------------------------

std::string cache_dir(const RunConfig& cfg) {
    if (const char* env = std::getenv("APXGRP_CACHE_DIR")) return env;
    return cfg.output.dir + "/cache";
}

FinSet materialize(const RunConfig& cfg, std::string* label) {
    if (!cfg.input.file.empty()) {
        std::ifstream in(cfg.input.file);
        if (!in) throw ConfigError("cannot open set file '" + cfg.input.file + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        FinSet X = FinSet::deserialize(ss.str());
        if (cfg.backend && !cfg.backend->interoperable(X.ctx()))
            throw ConfigError("set file backend does not match the configured backend");
        *label = "file:" + cfg.input.file;
        return X;
    }
    const FamilySpec& spec = *cfg.input.family;
    *label = spec.label();
    if (cfg.output.cache) {
        std::string backend = spec.ctx ? spec.ctx->describe() : "default";
        std::uint64_t key = fnv1a64(backend + "|" + spec.label() + "|" + std::to_string(spec.seed));
        std::ostringstream name;
        name << std::hex << key;
        fs::path path = fs::path(cache_dir(cfg)) / (name.str() + ".apx");
        if (fs::exists(path)) {
            std::ifstream in(path);
            std::stringstream ss;
            ss << in.rdbuf();
            return FinSet::deserialize(ss.str());
        }
        FinSet X = generate(spec);
        fs::create_directories(path.parent_path());
        std::ofstream out(path);
        out << X.serialize();
        return X;
    }
    return generate(spec);
}

// --- per-command handlers -----------------------------------------------------

std::uint64_t flag_u64(const CommandSpec& cmd, const std::string& key, std::uint64_t fallback) {
    auto it = cmd.flags.find(key);
    if (it == cmd.flags.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (...) {
        throw ConfigError("command flag '" + key + "' expects an unsigned integer");
    }
}

double flag_double(const CommandSpec& cmd, const std::string& key, double fallback) {
    auto it = cmd.flags.find(key);
    if (it == cmd.flags.end()) return fallback;
    try {
        return std::stod(it->second);
    } catch (...) {
        throw ConfigError("command flag '" + key + "' expects a number");
    }
}

std::string flag_str(const CommandSpec& cmd, const std::string& key, const std::string& fallback) {
    auto it = cmd.flags.find(key);
    return it == cmd.flags.end() ? fallback : it->second;
}

bool flag_bool(const CommandSpec& cmd, const std::string& key, bool fallback) {
    auto it = cmd.flags.find(key);
    if (it == cmd.flags.end()) return fallback;
    if (it->second == "on" || it->second == "true") return true;
    if (it->second == "off" || it->second == "false") return false;
    throw ConfigError("command flag '" + key + "' expects on/off");
}

json tower_report_json(const TowerReport& rep) {
    json j;
    j["depth"] = rep.depth;
    j["nested_ok"] = rep.nested_ok;
    if (!rep.nested_ok) j["truncated_at"] = rep.truncated_at;
    j["c"] = rep.c;
    if (rep.e) j["e"] = *rep.e;
    if (rep.seed_in_derived_square) j["seed_in_derived_square"] = *rep.seed_in_derived_square;
    j["level_sizes"] = rep.level_sizes;
    json checks = json::array();
    for (const auto& c : rep.checks) {
        json row;
        row["check"] = c.key();
        row["pass"] = c.pass;
        if (c.value) row["value"] = *c.value;
        if (!c.witness.empty()) row["witness"] = c.witness;
        checks.push_back(std::move(row));
    }
    j["checks"] = std::move(checks);
    return j;
}

json probe_json(const ProbeReport& rep) {
    json j;
    j["kind"] = rep.kind;
    j["verdict"] = rep.verdict;
    j["payload"] = rep.payload;
    if (!rep.witnesses.empty()) j["witnesses"] = rep.witnesses;
    return j;
}

struct CommandOutput {
    json outputs;
    std::map<std::string, std::string> artifacts;
};

// growth check |X^n| <= t^(n-2) |X| as exact integers, n = 4..6
json growth_checks(const FinSet& X, std::size_t pair_budget) {
    json j;
    FinSet cur = product(X, X);
    std::vector<std::size_t> cards = {X.size(), cur.size()};  // |X|, |X^2|
    for (int n = 3; n <= 6; ++n) {
        if (cur.size() * X.size() > pair_budget) break;
        cur = product(cur, X);
        cards.push_back(cur.size());
    }
    json card_arr = json::array();
    for (auto c : cards) card_arr.push_back(c);
    j["cards"] = card_arr;
    if (cards.size() >= 3) {
        const unsigned __int128 c1 = cards[0], c3 = cards[2];
        for (std::size_t n = 4; n < cards.size() + 1 && n <= 6; ++n) {
            // |X^n| * |X|^(n-3) <= |X^3|^(n-2)
            unsigned __int128 lhs = cards[n - 1];
            for (std::size_t i = 0; i + 3 < n; ++i) lhs *= c1;
            unsigned __int128 rhs = 1;
            for (std::size_t i = 0; i + 2 < n; ++i) rhs *= c3;
            j["growth" + std::to_string(n)] = (lhs <= rhs);
        }
    }
    return j;
}

CommandOutput run_battery_row(const FinSet& X, const std::string& label, std::vector<std::string>* csv_out) {
    CommandOutput out;
    TriplingStat st = tripling(X);
    // the k-statistic and the growth law live on symmetric sets with identity
    const bool already_sym = st.symmetric && contains_identity(X);
    FinSet S = already_sym ? X : symmetrize(X);
    ApproxConstant ac = approx_constant(S);
    CoverResult cv = ruzsa_cover(product(X, X), X);
    json growth = growth_checks(S, 200'000'000);

    json j;
    j["label"] = label;
    j["card_x"] = st.card_x;
    j["symmetrized_for_k"] = !already_sym;
    j["card_xx"] = st.card_xx;
    j["card_xxinvx"] = st.card_xinvx_form;
    j["doubling"] = st.doubling().value();
    j["tripling"] = st.tripling().value();
    j["k_lower"] = ac.k_lower.value();
    j["k_upper"] = ac.k_upper;
    j["ruzsa_count"] = cv.count;
    j["ruzsa_bound"] = cv.certified_bound.value();
    j["ruzsa_verified"] = cv.verified;
    j["growth"] = growth;
    out.outputs = std::move(j);

    if (csv_out) {
        auto g = [&](const std::string& k) {
            return growth.contains(k) ? (growth[k].get<bool>() ? std::string("pass") : std::string("fail"))
                                      : std::string("skipped");
        };
        csv_out->push_back(csv_row({X.ctx().describe(), label, std::to_string(st.card_x), std::to_string(st.card_xx),
                                    std::to_string(st.card_xinvx_form), fmt_ratio(st.doubling()),
                                    fmt_ratio(st.tripling()), fmt_ratio(ac.k_lower), std::to_string(ac.k_upper),
                                    std::to_string(cv.count), fmt_ratio(cv.certified_bound), g("growth4"),
                                    g("growth5"), g("growth6")}));
    }
    return out;
}

const char* kPlotStub = R"(#!/usr/bin/env python3
"""Quick ratio-vs-size plots for apxgrp CSV tables.

Usage: plot_ratios.py <table.csv> [ratio-column] [out.png]
"""
import csv
import sys

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    path = sys.argv[1]
    column = sys.argv[2] if len(sys.argv) > 2 else "tripling"
    out = sys.argv[3] if len(sys.argv) > 3 else "ratios.png"
    xs, ys = [], []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            try:
                xs.append(float(row["card_x"]))
                ys.append(float(row[column]))
            except (KeyError, ValueError):
                continue
    plt.figure(figsize=(6, 4))
    plt.semilogx(xs, ys, "o-")
    plt.xlabel("|X|")
    plt.ylabel(column)
    plt.grid(True, alpha=0.3)
    plt.tight_layout()
    plt.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
)";

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

RunReport run_compute(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    if (cfg.threads) set_thread_count(cfg.threads);

    RunReport rep;
    json& doc = rep.doc;
    doc["tool"] = "apxgrp";
    doc["version"] = kToolVersion;
    doc["command"] = cfg.command.name;
    doc["seed"] = cfg.seed;
    doc["config"] = cfg.text;

    const std::string& cmd = cfg.command.name;
    json outputs;

    if (cmd == "corpus-run") {
        std::string name = flag_str(cfg.command, "corpus", "paper-examples");
        std::vector<std::string> rows;
        rows.push_back(csv_row({"backend", "family", "card_x", "card_xx", "card_xxinvx", "doubling", "tripling",
                                "k_lower", "k_upper", "ruzsa_count", "ruzsa_bound", "growth4", "growth5", "growth6"}));
        json entries = json::array();
        for (const FamilySpec& spec : corpus(name)) {
            FinSet X = generate(spec);
            CommandOutput row = run_battery_row(X, spec.label(), &rows);
            entries.push_back(std::move(row.outputs));
        }
        outputs["corpus"] = name;
        outputs["entries"] = std::move(entries);
        std::string table;
        for (auto& r : rows) table += r;
        rep.artifacts["corpus.csv"] = table;
        doc["backend"] = "per-entry";
        doc["input"] = "corpus:" + name;
    } else {
        std::string label;
        FinSet X = materialize(cfg, &label);
        doc["backend"] = X.ctx().describe();
        doc["input"] = label;
        doc["card_x"] = X.size();
        std::vector<std::string> rows;

        if (cmd == "tripling") {
            TriplingStat st = tripling(X);
            outputs["card_x"] = st.card_x;
            outputs["card_xx"] = st.card_xx;
            outputs["card_xxinvx"] = st.card_xinvx_form;
            if (st.symmetric) outputs["card_xxx"] = st.card_xxx;
            outputs["symmetric"] = st.symmetric;
            outputs["doubling"] = st.doubling().value();
            outputs["tripling"] = st.tripling().value();
            rows.push_back(csv_row({"backend", "family", "card_x", "card_xx", "card_xxinvx", "card_xxx", "doubling",
                                    "tripling"}));
            rows.push_back(csv_row({X.ctx().describe(), label, std::to_string(st.card_x), std::to_string(st.card_xx),
                                    std::to_string(st.card_xinvx_form),
                                    st.symmetric ? std::to_string(st.card_xxx) : "", fmt_ratio(st.doubling()),
                                    fmt_ratio(st.tripling())}));
            rep.artifacts["tripling.csv"] = rows[0] + rows[1];
        } else if (cmd == "cover") {
            Side side = flag_str(cfg.command, "side", "right") == "left" ? Side::Left : Side::Right;
            FinSet W = flag_str(cfg.command, "target", "xx") == "xxx" ? power(X, 3) : product(X, X);
            CoverResult cv = ruzsa_cover(W, X, side);
            outputs["count"] = cv.count;
            outputs["bound_num"] = cv.certified_bound.num;
            outputs["bound_den"] = cv.certified_bound.den;
            outputs["tile"] = cv.tile_desc;
            outputs["card_tile"] = cv.tile.size();
            outputs["card_target"] = W.size();
            outputs["verified"] = cv.verified;
            json tr = json::array();
            for (const auto& e : cv.translates) tr.push_back(X.ctx().format(e));
            outputs["translates"] = std::move(tr);
            rows.push_back(csv_row({"backend", "family", "card_x", "card_target", "tile", "count", "bound", "verified"}));
            rows.push_back(csv_row({X.ctx().describe(), label, std::to_string(X.size()), std::to_string(W.size()),
                                    cv.tile_desc, std::to_string(cv.count), fmt_ratio(cv.certified_bound),
                                    cv.verified ? "yes" : "no"}));
            rep.artifacts["cover.csv"] = rows[0] + rows[1];
        } else if (cmd == "commens") {
            std::string other = flag_str(cfg.command, "other_file", "");
            if (other.empty()) throw ConfigError("commens needs an 'other_file' flag");
            std::ifstream in(other);
            if (!in) throw ConfigError("cannot open set file '" + other + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            FinSet B = FinSet::deserialize(ss.str());
            auto res = commensurability(X, B, flag_u64(cfg.command, "budget", 10000));
            outputs["e_ab"] = res.e_ab ? json(*res.e_ab) : json("inf");
            outputs["e_ba"] = res.e_ba ? json(*res.e_ba) : json("inf");
        } else if (cmd == "approx-k") {
            ApproxConstant ac = approx_constant(X);
            outputs["k_lower_num"] = ac.k_lower.num;
            outputs["k_lower_den"] = ac.k_lower.den;
            outputs["k_upper"] = ac.k_upper;
            outputs["card_xx"] = ac.card_xx;
            rows.push_back(csv_row({"backend", "family", "card_x", "card_xx", "k_lower", "k_upper"}));
            rows.push_back(csv_row({X.ctx().describe(), label, std::to_string(X.size()), std::to_string(ac.card_xx),
                                    fmt_ratio(ac.k_lower), std::to_string(ac.k_upper)}));
            rep.artifacts["approx_k.csv"] = rows[0] + rows[1];
        } else if (cmd == "tower") {
            TowerOptions opts;
            opts.ambient = &X;
            opts.check7_all_m = flag_bool(cfg.command, "all_m", false);
            auto levels = build_tower(X, flag_u64(cfg.command, "depth", 6));
            TowerReport tr = verify_tower(levels, opts);
            outputs = tower_report_json(tr);
            std::size_t passed = 0;
            for (const auto& c : tr.checks) passed += c.pass;
            rows.push_back(csv_row({"backend", "family", "card_x", "depth", "e", "c", "checks_passed", "checks_total"}));
            rows.push_back(csv_row({X.ctx().describe(), label, std::to_string(X.size()), std::to_string(tr.depth),
                                    tr.e ? std::to_string(*tr.e) : "", std::to_string(tr.c), std::to_string(passed),
                                    std::to_string(tr.checks.size())}));
            rep.artifacts["tower.csv"] = rows[0] + rows[1];
        } else if (cmd == "seed-search") {
            std::string fam = flag_str(cfg.command, "family", "dilates");
            SeedFamily family = SeedFamily::Dilates;
            if (fam == "derived-square") family = SeedFamily::DerivedSquare;
            else if (fam == "dilates") family = SeedFamily::Dilates;
            else if (fam == "cayley-balls") family = SeedFamily::CayleyBalls;
            else if (fam == "user-list") throw ConfigError("user-list seeds are a library-level feature");
            else throw ConfigError("unknown seed family '" + fam + "'");
            SeedSearchResult res = seed_search(X, family, flag_u64(cfg.command, "budget", 6));
            outputs["chosen"] = res.chosen;
            outputs["card_seed"] = res.seed.size();
            json cands = json::array();
            for (const auto& c : res.candidates) {
                json row;
                row["candidate"] = c.desc;
                row["skipped"] = c.skipped;
                if (!c.skipped) {
                    row["verified_depth"] = c.verified_depth;
                    row["c"] = c.c;
                    row["e"] = c.e;
                }
                cands.push_back(std::move(row));
            }
            outputs["candidates"] = std::move(cands);
            outputs["report"] = tower_report_json(res.report);
        } else if (cmd == "closure") {
            ClosureResult cl = group_closure(X, flag_u64(cfg.command, "max_size", 1'000'000));
            outputs["closed"] = !cl.exceeded;
            outputs["steps"] = cl.steps;
            outputs["size"] = cl.exceeded ? cl.last_size : cl.closure.size();
            if (cl.exceeded) outputs["verdict"] = "exceeded";
        } else if (cmd == "near-subgroup") {
            outputs = probe_json(near_subgroup_probe(X));
        } else if (cmd == "perfectness") {
            PerfStat st = perfectness_stat(X, flag_u64(cfg.command, "l", 2), flag_u64(cfg.command, "m", 2),
                                           flag_u64(cfg.command, "samples", 1000), cfg.seed);
            outputs["p_hat"] = st.p_hat;
            outputs["radius"] = st.radius;
            outputs["samples"] = st.samples;
            outputs["hits"] = st.hits;
            outputs["exhaustive"] = st.exhaustive;
            outputs["seed"] = st.seed;
        } else if (cmd == "word-depth") {
            std::string lits = flag_str(cfg.command, "a", "");
            if (lits.empty()) throw ConfigError("word-depth needs an 'a' flag with generator literals");
            std::vector<Elem> a_list;
            std::stringstream ss(lits);
            std::string lit;
            while (std::getline(ss, lit, '|'))
                if (!lit.empty()) a_list.push_back(X.ctx().parse(lit));
            WordDepthOptions opts;
            opts.use_inverses = flag_bool(cfg.command, "inverses", false);
            WordDepthResult res = word_depth(X, a_list, flag_u64(cfg.command, "n_max", 8), opts);
            outputs["d"] = res.d ? json(*res.d) : json("inf");
            json bs = json::array();
            for (const auto& b : res.b_chosen) bs.push_back(X.ctx().format(b));
            outputs["b_chosen"] = std::move(bs);
        } else if (cmd == "freiman") {
            outputs = probe_json(freiman_exponent_probe(X, flag_u64(cfg.command, "e_budget", 64)));
        } else if (cmd == "dimcmp") {
            std::vector<VarietySpec> vars;
            std::string names = flag_str(cfg.command, "varieties", "");
            if (names.empty()) {
                vars = builtin_varieties();
            } else {
                std::stringstream ss(names);
                std::string nm;
                while (std::getline(ss, nm, ','))
                    if (!nm.empty()) vars.push_back(variety_by_name(nm));
            }
            DimReport dr = lp_report(X, vars, flag_double(cfg.command, "epsilon", 0.02));
            outputs["p"] = dr.p;
            outputs["card_gamma"] = dr.gamma_card;
            outputs["dim_g"] = dr.dim_g;
            outputs["gamma0"] = dr.gamma0;
            outputs["epsilon"] = dr.epsilon;
            json jrows = json::array();
            rows.push_back(csv_row({"backend", "family", "variety", "count", "dim", "components", "ratio",
                                    "ratio_adj", "bound", "slack", "pass"}));
            for (const auto& r : dr.rows) {
                json jr;
                jr["variety"] = r.name;
                jr["count"] = r.count;
                jr["dim"] = r.dim;
                jr["components"] = r.components;
                jr["ratio"] = r.ratio;
                jr["ratio_adj"] = r.ratio_adj;
                jr["bound"] = r.bound;
                jr["slack"] = r.slack;
                jr["pass"] = r.pass;
                jr["unbalanced"] = r.unbalanced;
                jrows.push_back(std::move(jr));
                rows.push_back(csv_row({X.ctx().describe(), label, r.name, std::to_string(r.count),
                                        std::to_string(r.dim), std::to_string(r.components), fmt_double(r.ratio),
                                        fmt_double(r.ratio_adj), fmt_double(r.bound), fmt_double(r.slack),
                                        r.pass ? "yes" : "no"}));
            }
            outputs["rows"] = std::move(jrows);
            std::string table;
            for (auto& r : rows) table += r;
            rep.artifacts["dimcmp.csv"] = table;
        } else if (cmd == "dichotomy") {
            outputs = probe_json(linear_dichotomy_probe(X, flag_u64(cfg.command, "p_bound", 13)));
        } else if (cmd == "gen") {
            std::string fname = "set_" + std::to_string(fnv1a64(label)) + ".apx";
            rep.artifacts[fname] = X.serialize();
            outputs["card_x"] = X.size();
            outputs["file"] = fname;
        } else {
            throw ConfigError("unknown command '" + cmd + "'");
        }
    }

    doc["outputs"] = std::move(outputs);
    rep.artifacts["plot_ratios.py"] = kPlotStub;

    // checksum over the volatile-free document plus all artifacts
    json hashed = doc;
    hashed.erase("version");
    hashed.erase("tool");
    std::string material = hashed.dump();
    material += '\0';
    for (const auto& [name, content] : rep.artifacts) {
        material += name;
        material += '\0';
        material += content;
        material += '\0';
    }
    std::ostringstream ck;
    ck << "fnv64:" << std::hex << fnv1a64(material);

    const auto t1 = std::chrono::steady_clock::now();
    doc["wall_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    doc["checksum"] = ck.str();
    return rep;
}

void write_outputs(const RunReport& rep, const RunConfig& cfg) {
    fs::create_directories(cfg.output.dir);
    if (cfg.output.json) {
        std::ofstream out(fs::path(cfg.output.dir) / "report.json");
        out << rep.doc.dump(2) << "\n";
    }
    for (const auto& [name, content] : rep.artifacts) {
        if (!cfg.output.csv && name.size() > 4 && name.substr(name.size() - 4) == ".csv") continue;
        std::ofstream out(fs::path(cfg.output.dir) / name);
        out << content;
    }
}

bool verify_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open report '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
    if (!doc.contains("config") || !doc.contains("checksum")) throw ConfigError("report lacks config or checksum");
    RunConfig cfg = RunConfig::parse(doc["config"].get<std::string>());
    RunReport fresh = run_compute(cfg);
    return fresh.doc["checksum"] == doc["checksum"];
}

}  // namespace apxgrp
