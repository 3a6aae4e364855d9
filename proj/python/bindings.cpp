#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "apxgrp/covering.hpp"
#include "apxgrp/dimcmp.hpp"
#include "apxgrp/families.hpp"
#include "apxgrp/parallel.hpp"
#include "apxgrp/probes.hpp"
#include "apxgrp/runner.hpp"
#include "apxgrp/tower.hpp"

namespace py = pybind11;
using namespace apxgrp;

namespace {

using json = nlohmann::ordered_json;

// pybind11 holders cannot be shared_ptr<const T>; wrap the immutable context.
struct PyCtx {
    CtxPtr p;
};

std::string tower_json(const TowerReport& rep) {
    json j;
    j["depth"] = rep.depth;
    j["nested_ok"] = rep.nested_ok;
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
    return j.dump();
}

std::string probe_json_str(const ProbeReport& rep) {
    json j;
    j["kind"] = rep.kind;
    j["verdict"] = rep.verdict;
    j["payload"] = rep.payload;
    if (!rep.witnesses.empty()) j["witnesses"] = rep.witnesses;
    return j.dump();
}

}  // namespace

PYBIND11_MODULE(_apxgrp, m) {
    m.doc() = "finite approximate-subgroup statistics: exact set algebra over group backends";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<BudgetError>(m, "BudgetError");
    py::register_exception<OverflowError>(m, "CoordinateOverflow");

    py::class_<PyCtx>(m, "GroupCtx")
        .def_static("integer_lattice", [](int d) { return PyCtx{GroupCtx::integer_lattice(d)}; }, py::arg("d"))
        .def_static("mod_lattice",
                    [](std::uint64_t n, int d) { return PyCtx{GroupCtx::mod_lattice(n, d)}; }, py::arg("n"),
                    py::arg("d"))
        .def_static("symmetric", [](int n) { return PyCtx{GroupCtx::symmetric(n)}; }, py::arg("n"))
        .def_static("sl2", [](std::uint64_t p) { return PyCtx{GroupCtx::sl2(p)}; }, py::arg("p"))
        .def_static("gl2", [](std::uint64_t p) { return PyCtx{GroupCtx::gl2(p)}; }, py::arg("p"))
        .def_static("heisenberg", [] { return PyCtx{GroupCtx::heisenberg()}; })
        .def_static("from_descriptor",
                    [](const std::string& s) { return PyCtx{GroupCtx::from_descriptor(s)}; })
        .def_static(
            "cayley",
            [](const std::string& gens, const std::vector<std::pair<std::string, std::string>>& rules,
               std::size_t max_word) { return PyCtx{GroupCtx::cayley({gens, rules, max_word})}; },
            py::arg("gens"), py::arg("rules") = std::vector<std::pair<std::string, std::string>>{},
            py::arg("max_word") = 32)
        .def("describe", [](const PyCtx& c) { return c.p->describe(); })
        .def("mul", [](const PyCtx& ctx, const std::string& a, const std::string& b) {
            return ctx.p->format(ctx.p->mul(ctx.p->parse(a), ctx.p->parse(b)));
        })
        .def("inv", [](const PyCtx& ctx, const std::string& a) { return ctx.p->format(ctx.p->inv(ctx.p->parse(a))); })
        .def("identity", [](const PyCtx& ctx) { return ctx.p->format(ctx.p->identity()); })
        .def("__repr__", [](const PyCtx& c) { return "<GroupCtx " + c.p->describe() + ">"; });

    py::class_<FinSet>(m, "FinSet")
        .def_static("of", [](const PyCtx& ctx, const std::vector<std::string>& lits) {
            return FinSet::of_literals(ctx.p, lits);
        })
        .def_static("deserialize", [](const std::string& text) { return FinSet::deserialize(text); })
        .def("serialize", &FinSet::serialize)
        .def("__len__", &FinSet::size)
        .def("__contains__", [](const FinSet& s, const std::string& lit) { return s.contains(s.ctx().parse(lit)); })
        .def("elems", [](const FinSet& s) {
            std::vector<std::string> out;
            out.reserve(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) out.push_back(s.ctx().format_raw(s.block(i)));
            return out;
        })
        .def("ctx", [](const FinSet& s) { return PyCtx{s.ctx_ptr()}; })
        .def("__repr__", [](const FinSet& s) {
            return "<FinSet " + s.ctx().describe() + " card=" + std::to_string(s.size()) + ">";
        });

    m.def("set_thread_count", &set_thread_count);

    // set algebra
    m.def("product", &product);
    m.def("inverse_set", &inverse_set);
    m.def("symmetrize", &symmetrize);
    m.def("power", &power, py::arg("x"), py::arg("n"));
    m.def("set_union", &set_union);
    m.def("is_symmetric", &is_symmetric);
    m.def("contains_identity", &contains_identity);
    m.def("tripling", [](const FinSet& x) {
        TriplingStat st = tripling(x);
        py::dict d;
        d["card_x"] = st.card_x;
        d["card_xx"] = st.card_xx;
        d["card_xxinvx"] = st.card_xinvx_form;
        d["card_xxx"] = st.card_xxx;
        d["symmetric"] = st.symmetric;
        d["doubling"] = st.doubling().value();
        d["tripling"] = st.tripling().value();
        return d;
    });
    m.def("commutator_set", &commutator_set);
    m.def("conj_set", [](const std::string& a, const FinSet& x) { return conj_set(x.ctx().parse(a), x); });
    m.def(
        "conj_prod_size",
        [](const std::vector<std::string>& lits, const FinSet& x, std::size_t cap) {
            std::vector<Elem> a_list;
            for (const auto& l : lits) a_list.push_back(x.ctx().parse(l));
            ConjProdSize r = conj_prod_size(a_list, x, cap);
            return py::make_tuple(r.size, r.capped);
        },
        py::arg("a_list"), py::arg("x"), py::arg("cap") = kDefaultConjProdCap);

    // covering
    m.def("disjoint_translates", [](const FinSet& z, const FinSet& w) {
        std::vector<std::string> out;
        for (const auto& e : disjoint_translates(z, w)) out.push_back(z.ctx().format(e));
        return out;
    });
    m.def(
        "ruzsa_cover",
        [](const FinSet& w, const FinSet& z, const std::string& side) {
            CoverResult cv = ruzsa_cover(w, z, side == "left" ? Side::Left : Side::Right);
            py::dict d;
            d["count"] = cv.count;
            d["bound_num"] = cv.certified_bound.num;
            d["bound_den"] = cv.certified_bound.den;
            d["tile"] = cv.tile_desc;
            d["card_tile"] = cv.tile.size();
            d["verified"] = cv.verified;
            std::vector<std::string> tr;
            for (const auto& e : cv.translates) tr.push_back(w.ctx().format(e));
            d["translates"] = tr;
            return d;
        },
        py::arg("w"), py::arg("z"), py::arg("side") = "right");
    m.def(
        "commensurability",
        [](const FinSet& a, const FinSet& b, std::size_t budget) {
            auto r = commensurability(a, b, budget);
            return py::make_tuple(r.e_ab ? py::object(py::int_(*r.e_ab)) : py::none(),
                                  r.e_ba ? py::object(py::int_(*r.e_ba)) : py::none());
        },
        py::arg("a"), py::arg("b"), py::arg("budget") = 10000);
    m.def("approx_constant", [](const FinSet& x) {
        ApproxConstant r = approx_constant(x);
        py::dict d;
        d["k_lower_num"] = r.k_lower.num;
        d["k_lower_den"] = r.k_lower.den;
        d["k_upper"] = r.k_upper;
        d["card_xx"] = r.card_xx;
        return d;
    });

    // tower
    m.def("build_tower", &build_tower, py::arg("x1"), py::arg("n"));
    m.def(
        "verify_tower",
        [](const std::vector<FinSet>& levels, bool all_m) {
            TowerOptions opts;
            opts.check7_all_m = all_m;
            return tower_json(verify_tower(levels, opts));
        },
        py::arg("levels"), py::arg("all_m") = false);
    m.def(
        "seed_search",
        [](const FinSet& x, const std::string& family, std::size_t budget) {
            SeedFamily f = SeedFamily::Dilates;
            if (family == "derived-square") f = SeedFamily::DerivedSquare;
            else if (family == "dilates") f = SeedFamily::Dilates;
            else if (family == "cayley-balls") f = SeedFamily::CayleyBalls;
            else throw ConfigError("unknown seed family '" + family + "'");
            SeedSearchResult r = seed_search(x, f, budget);
            py::dict d;
            d["chosen"] = r.chosen;
            d["seed"] = r.seed;
            d["report"] = tower_json(r.report);
            return d;
        },
        py::arg("x"), py::arg("family") = "dilates", py::arg("budget") = 6);

    // probes
    m.def(
        "group_closure",
        [](const FinSet& x, std::size_t max_size) {
            ClosureResult r = group_closure(x, max_size);
            py::dict d;
            d["exceeded"] = r.exceeded;
            d["steps"] = r.steps;
            if (!r.exceeded) d["closure"] = r.closure;
            d["size"] = r.exceeded ? r.last_size : r.closure.size();
            return d;
        },
        py::arg("x"), py::arg("max_size") = 1000000)
    ;
    m.def("near_subgroup_probe", [](const FinSet& x) { return probe_json_str(near_subgroup_probe(x)); });
    m.def(
        "perfectness_stat",
        [](const FinSet& x, std::size_t l, std::size_t mm, std::size_t samples, std::uint64_t seed) {
            PerfStat st = perfectness_stat(x, l, mm, samples, seed);
            py::dict d;
            d["p_hat"] = st.p_hat;
            d["radius"] = st.radius;
            d["samples"] = st.samples;
            d["hits"] = st.hits;
            d["exhaustive"] = st.exhaustive;
            return d;
        },
        py::arg("x"), py::arg("l"), py::arg("m"), py::arg("samples") = 1000, py::arg("seed") = 0);
    m.def(
        "word_depth",
        [](const FinSet& x, const std::vector<std::string>& lits, std::size_t n_max, bool inverses) {
            std::vector<Elem> a_list;
            for (const auto& l : lits) a_list.push_back(x.ctx().parse(l));
            WordDepthOptions opts;
            opts.use_inverses = inverses;
            WordDepthResult r = word_depth(x, a_list, n_max, opts);
            py::dict d;
            d["d"] = r.d ? py::object(py::int_(*r.d)) : py::none();
            std::vector<std::string> bs;
            for (const auto& b : r.b_chosen) bs.push_back(x.ctx().format(b));
            d["b_chosen"] = bs;
            return d;
        },
        py::arg("x"), py::arg("a_list"), py::arg("n_max") = 8, py::arg("inverses") = false);
    m.def("freiman_exponent_probe", [](const FinSet& x, std::size_t budget) {
        return probe_json_str(freiman_exponent_probe(x, budget));
    }, py::arg("x"), py::arg("e_budget") = 64);

    // dimension comparison
    m.def("variety_count", [](const FinSet& gamma, const std::string& name) {
        return variety_count(gamma, variety_by_name(name));
    });
    m.def(
        "lp_report",
        [](const FinSet& gamma, double epsilon) {
            DimReport rep = lp_report(gamma, builtin_varieties(), epsilon);
            json j;
            j["p"] = rep.p;
            j["card_gamma"] = rep.gamma_card;
            j["gamma0"] = rep.gamma0;
            j["epsilon"] = rep.epsilon;
            json rows = json::array();
            for (const auto& r : rep.rows) {
                json row;
                row["variety"] = r.name;
                row["count"] = r.count;
                row["dim"] = r.dim;
                row["components"] = r.components;
                row["ratio"] = r.ratio;
                row["ratio_adj"] = r.ratio_adj;
                row["bound"] = r.bound;
                row["pass"] = r.pass;
                rows.push_back(std::move(row));
            }
            j["rows"] = std::move(rows);
            j["all_pass"] = rep.all_pass();
            return j.dump();
        },
        py::arg("gamma"), py::arg("epsilon") = 0.02);
    m.def("linear_dichotomy_probe", [](const FinSet& x, std::uint64_t p_bound) {
        return probe_json_str(linear_dichotomy_probe(x, p_bound));
    }, py::arg("x"), py::arg("p_bound") = 13);

    // families
    m.def("beatty", [](std::int64_t n, const std::string& alpha) {
        FamilySpec s;
        s.kind = FamilyKind::Beatty;
        s.n = n;
        s.alpha = alpha;
        return generate(s);
    });
    m.def("interval_box", [](int d, std::int64_t n) {
        FamilySpec s;
        s.kind = FamilyKind::IntervalBox;
        s.ctx = GroupCtx::integer_lattice(d);
        s.d = d;
        s.n = n;
        return generate(s);
    });
    m.def(
        "heisenberg_box",
        [](std::int64_t r, bool sym) {
            FamilySpec s;
            s.kind = FamilyKind::HeisenbergBox;
            s.r = r;
            s.symmetrized = sym;
            return generate(s);
        },
        py::arg("r"), py::arg("symmetrized") = false);
    m.def(
        "cayley_ball",
        [](const PyCtx& ctx, const std::vector<std::string>& gens, std::size_t radius) {
            FamilySpec s;
            s.kind = FamilyKind::CayleyBall;
            s.ctx = ctx.p;
            s.gens = gens;
            s.radius = radius;
            return generate(s);
        },
        py::arg("ctx"), py::arg("gens"), py::arg("radius") = 0);
    m.def("corpus_names", &corpus_names);

    // reproducible runs
    m.def("run_config", [](const std::string& text) {
        RunConfig cfg = RunConfig::parse(text);
        RunReport rep = run_compute(cfg);
        return rep.doc.dump();
    });
    m.attr("__version__") = kToolVersion;
}
