#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "apxgrp/runner.hpp"

using namespace apxgrp;
namespace fs = std::filesystem;

namespace {

const char* kTriplingConfig = R"(
# minimal run: tripling of a beatty set
backend {
  kind = int-lattice
  d = 1
}
input {
  family = beatty
  n = 50
  alpha = 4pi
}
command {
  name = tripling
}
output {
  dir = OUTDIR
  formats = csv,json
}
seed = 7
)";

std::string with_dir(const std::string& text, const std::string& dir) {
    std::string out = text;
    auto pos = out.find("OUTDIR");
    out.replace(pos, 6, dir);
    return out;
}

}  // namespace

TEST_CASE("config parser: blocks, comments, and hard errors on unknown keys") {
    ConfigNode root = parse_config_text("a = 1\nblk {\n  b = 2 # trailing\n}\n");
    CHECK(root.get("a", "") == "1");
    CHECK(root.blocks.at("blk").get("b", "") == "2");

    CHECK_THROWS_AS(parse_config_text("blk {\n a = 1\n"), ConfigError);   // unterminated
    CHECK_THROWS_AS(parse_config_text("}\n"), ConfigError);               // stray brace
    CHECK_THROWS_AS(parse_config_text("a = 1\na = 2\n"), ConfigError);    // duplicate

    CHECK_THROWS_AS(RunConfig::parse("command { name = tripling }\ninput { family = beatty }\nwat = 1\n"),
                    ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("command { name = nope }\ninput { family = beatty }\n"), ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("command { name = tripling\n  bogus = 1\n}\ninput { family = beatty }\n"),
                    ConfigError);
    CHECK_THROWS_AS(RunConfig::parse("command { name = tripling }\n"), ConfigError);  // missing input
}

TEST_CASE("run_compute tripling produces the documented outputs and artifacts") {
    fs::path dir = fs::temp_directory_path() / "apxgrp_test_tripling";
    fs::remove_all(dir);
    RunConfig cfg = RunConfig::parse(with_dir(kTriplingConfig, dir.string()));
    RunReport rep = run_compute(cfg);
    CHECK(rep.doc["command"] == "tripling");
    CHECK(rep.doc["card_x"] == 101);
    CHECK(rep.doc["outputs"]["card_xx"].get<std::size_t>() <= 4 * 101);
    CHECK(rep.artifacts.count("tripling.csv") == 1);
    CHECK(rep.artifacts.count("plot_ratios.py") == 1);
    CHECK(rep.doc["checksum"].get<std::string>().rfind("fnv64:", 0) == 0);

    write_outputs(rep, cfg);
    CHECK(fs::exists(dir / "report.json"));
    CHECK(fs::exists(dir / "tripling.csv"));
    std::ifstream csv(dir / "tripling.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("backend,family,card_x", 0) == 0);
    fs::remove_all(dir);
}

TEST_CASE("identical configs give identical checksums; wall time is excluded") {
    fs::path dir = fs::temp_directory_path() / "apxgrp_test_det";
    RunConfig cfg = RunConfig::parse(with_dir(kTriplingConfig, (dir / "a").string()));
    RunReport r1 = run_compute(cfg);
    RunReport r2 = run_compute(cfg);
    CHECK(r1.doc["checksum"] == r2.doc["checksum"]);
    // byte-identical output modulo the wall_ms field
    auto d1 = r1.doc, d2 = r2.doc;
    d1.erase("wall_ms");
    d2.erase("wall_ms");
    CHECK(d1.dump() == d2.dump());
    CHECK(r1.artifacts == r2.artifacts);
}

TEST_CASE("verify_report accepts untouched reports and rejects edited counts") {
    fs::path dir = fs::temp_directory_path() / "apxgrp_test_verify";
    fs::remove_all(dir);
    RunConfig cfg = RunConfig::parse(with_dir(kTriplingConfig, dir.string()));
    RunReport rep = run_compute(cfg);
    write_outputs(rep, cfg);
    CHECK(verify_report((dir / "report.json").string()));

    // tamper with a count field
    auto doc = rep.doc;
    doc["outputs"]["card_xx"] = 1;
    {
        std::ofstream out(dir / "report.json");
        out << doc.dump(2) << "\n";
    }
    CHECK_FALSE(verify_report((dir / "report.json").string()));

    // a different version string with the same config still passes
    auto vdoc = rep.doc;
    vdoc["version"] = "99.0.0";
    {
        std::ofstream out(dir / "report.json");
        out << vdoc.dump(2) << "\n";
    }
    CHECK(verify_report((dir / "report.json").string()));

    CHECK_THROWS_AS(verify_report((dir / "missing.json").string()), ConfigError);
    {
        std::ofstream out(dir / "report.json");
        out << "{not json";
    }
    CHECK_THROWS_AS(verify_report((dir / "report.json").string()), ConfigError);
    fs::remove_all(dir);
}

TEST_CASE("gen writes a loadable set serialization") {
    fs::path dir = fs::temp_directory_path() / "apxgrp_test_gen";
    fs::remove_all(dir);
    std::string text = R"(backend {
  kind = sl2
  p = 5
}
input {
  family = cayley-ball
  radius = 2
  gens = [[1,1],[0,1]] | [[1,0],[1,1]]
}
command {
  name = gen
}
output {
  dir = OUTDIR
}
)";
    RunConfig cfg = RunConfig::parse(with_dir(text, dir.string()));
    RunReport rep = run_compute(cfg);
    write_outputs(rep, cfg);
    std::string fname = rep.doc["outputs"]["file"].get<std::string>();
    std::ifstream in(dir / fname);
    std::stringstream ss;
    ss << in.rdbuf();
    FinSet back = FinSet::deserialize(ss.str());
    CHECK(back.size() == rep.doc["outputs"]["card_x"].get<std::size_t>());
    CHECK(back.ctx().describe() == "sl2 p=5");
    fs::remove_all(dir);
}

TEST_CASE("cache is a pure accelerator: hits reproduce cold-run bytes") {
    fs::path dir = fs::temp_directory_path() / "apxgrp_test_cache";
    fs::remove_all(dir);
    std::string text = with_dir(kTriplingConfig, dir.string());
    text += "\n";
    RunConfig cold_cfg = RunConfig::parse(text);
    RunReport cold = run_compute(cold_cfg);

    std::string cached_text = text;
    cached_text.replace(cached_text.find("formats = csv,json"), 18, "formats = csv,json\n  cache = on");
    RunConfig warm_cfg = RunConfig::parse(cached_text);
    RunReport warm1 = run_compute(warm_cfg);   // populates the cache
    RunReport warm2 = run_compute(warm_cfg);   // reads it back
    CHECK(warm1.doc["outputs"].dump() == cold.doc["outputs"].dump());
    CHECK(warm2.doc["outputs"].dump() == cold.doc["outputs"].dump());
    CHECK(warm1.doc["checksum"] == warm2.doc["checksum"]);
    CHECK(fs::exists(dir / "cache"));
    fs::remove_all(dir);
}

TEST_CASE("corpus-run emits one summary row per spec in stable order") {
    fs::path dir = fs::temp_directory_path() / "apxgrp_test_corpus";
    fs::remove_all(dir);
    std::string text = R"(command {
  name = corpus-run
  corpus = sl2-grid
}
output {
  dir = OUTDIR
}
)";
    RunConfig cfg = RunConfig::parse(with_dir(text, dir.string()));
    RunReport rep = run_compute(cfg);
    auto entries = rep.doc["outputs"]["entries"];
    CHECK(entries.size() == 8);
    std::string csv = rep.artifacts.at("corpus.csv");
    std::size_t lines = std::count(csv.begin(), csv.end(), '\n');
    CHECK(lines == entries.size() + 1);  // header + one row per spec
    RunReport again = run_compute(cfg);
    CHECK(again.doc["checksum"] == rep.doc["checksum"]);
    fs::remove_all(dir);
}
