#include "wick/problem.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "wick/errors.hpp"

namespace wick {

namespace {

using nlohmann::json;

struct Ctx {
    std::vector<Diagnostic>& out;
    void err(const std::string& path, const std::string& message) {
        out.push_back({path, message});
    }
};

bool require_object(const json& j, const std::string& path, Ctx& ctx) {
    if (j.is_object()) return true;
    ctx.err(path, "expected an object");
    return false;
}

int get_int(const json& j, const std::string& key, const std::string& path, Ctx& ctx,
            bool required, int fallback) {
    if (!j.contains(key)) {
        if (required) ctx.err(path + "." + key, "missing required field");
        return fallback;
    }
    if (!j[key].is_number_integer()) {
        ctx.err(path + "." + key, "expected an integer");
        return fallback;
    }
    return j[key].get<int>();
}

mpq_class get_rational(const json& j, const std::string& path, Ctx& ctx) {
    if (j.is_number_integer()) return mpq_class(j.get<long>());
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const EngineError& e) {
            ctx.err(path, e.what());
            return 0;
        }
    }
    ctx.err(path, "expected an integer or a \"p/q\" string");
    return 0;
}

GaussianRational get_coeff(const json& j, const std::string& path, Ctx& ctx) {
    if (!j.is_object()) {
        ctx.err(path, "expected an object with \"re\" and \"im\"");
        return {};
    }
    mpq_class re = j.contains("re") ? get_rational(j["re"], path + ".re", ctx) : mpq_class(0);
    mpq_class im = j.contains("im") ? get_rational(j["im"], path + ".im", ctx) : mpq_class(0);
    return {re, im};
}

// A polynomial is an array of {exps: [2n ints], coeff: {re, im}} monomials.
Jet get_poly(const json& j, int dim, const std::string& path, Ctx& ctx) {
    Jet f(dim);
    if (!j.is_array()) {
        ctx.err(path, "expected an array of monomials");
        return f;
    }
    for (size_t t = 0; t < j.size(); ++t) {
        std::string mp = path + "[" + std::to_string(t) + "]";
        const json& m = j[t];
        if (!m.is_object() || !m.contains("exps") || !m.contains("coeff")) {
            ctx.err(mp, "expected {\"exps\": [...], \"coeff\": {...}}");
            continue;
        }
        const json& ex = m["exps"];
        if (!ex.is_array() || ex.size() != static_cast<size_t>(2 * dim)) {
            ctx.err(mp + ".exps", "expected " + std::to_string(2 * dim) +
                                      " exponents (z then zbar)");
            continue;
        }
        Multi mi(static_cast<size_t>(2 * dim), 0);
        bool bad = false;
        for (size_t i = 0; i < ex.size(); ++i) {
            if (!ex[i].is_number_integer() || ex[i].get<int>() < 0) {
                ctx.err(mp + ".exps[" + std::to_string(i) + "]",
                        "expected a nonnegative integer");
                bad = true;
                break;
            }
            mi[i] = ex[i].get<int>();
        }
        if (bad) continue;
        GaussianRational c = get_coeff(m["coeff"], mp + ".coeff", ctx);
        f.set_coeff(mi, f.coeff(mi) + c);
    }
    return f;
}

JetMat get_poly_matrix(const json& j, int rows, int cols, int dim, const std::string& path,
                       Ctx& ctx) {
    JetMat m(rows, cols, dim);
    if (!j.is_array() || j.size() != static_cast<size_t>(rows)) {
        ctx.err(path, "expected " + std::to_string(rows) + " rows");
        return m;
    }
    for (int r = 0; r < rows; ++r) {
        const json& row = j[static_cast<size_t>(r)];
        std::string rp = path + "[" + std::to_string(r) + "]";
        if (!row.is_array() || row.size() != static_cast<size_t>(cols)) {
            ctx.err(rp, "expected " + std::to_string(cols) + " entries");
            continue;
        }
        for (int c = 0; c < cols; ++c)
            m.at(r, c) = get_poly(row[static_cast<size_t>(c)], dim,
                                  rp + "[" + std::to_string(c) + "]", ctx);
    }
    return m;
}

json poly_json(const Jet& f) {
    json a = json::array();
    for (const auto& [m, c] : f.coeffs()) {
        json mono;
        mono["exps"] = m;
        mono["coeff"] = {{"re", rational_str(c.re)}, {"im", rational_str(c.im)}};
        a.push_back(std::move(mono));
    }
    return a;
}

json poly_matrix_json(const JetMat& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(poly_json(m.at(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string mono_str(const Multi& m, int n) {
    std::string s;
    for (int g = 0; g < 2 * n; ++g) {
        int e = m[static_cast<size_t>(g)];
        if (e == 0) continue;
        if (!s.empty()) s += " ";
        s += (g < n ? "z" : "zbar") + std::to_string(g < n ? g + 1 : g - n + 1);
        if (e > 1) s += "^" + std::to_string(e);
    }
    return s.empty() ? "1" : s;
}

std::string asym_str(std::uint32_t mask, int n) {
    std::string s;
    for (int g = 0; g < 2 * n; ++g) {
        if (!(mask & (1u << g))) continue;
        if (!s.empty()) s += "^";
        s += (g < n ? "dz" : "dzbar") + std::to_string(g < n ? g + 1 : g - n + 1);
    }
    return s.empty() ? "-" : s;
}

void dump_element(std::ostringstream& os, const WeylElement& a, const std::string& label) {
    os << label << ":\n";
    if (a.is_zero()) {
        os << "  (empty)\n";
        return;
    }
    std::vector<const std::pair<const WeylKey, JetMat>*> terms;
    for (const auto& kv : a.terms()) terms.push_back(&kv);
    std::stable_sort(terms.begin(), terms.end(), [](const auto* x, const auto* y) {
        return total_degree(x->first) < total_degree(y->first);
    });
    int n = a.dim();
    for (const auto* kv : terms) {
        const auto& [k, v] = *kv;
        os << "  degree " << total_degree(k) << " lambda^" << k.lambda << " "
           << mono_str(k.sym, n) << " " << asym_str(k.asym, n);
        for (int r = 0; r < v.rows(); ++r)
            for (int c = 0; c < v.cols(); ++c)
                if (!v.at(r, c).is_zero())
                    os << "\n    [" << r << "][" << c << "] = " << v.at(r, c).str();
        os << "\n";
    }
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"flat", "fubini_study", "hyperbolic_disc"};
    return names;
}

void parse_chart(const json& j, ProblemSpec& spec, Ctx& ctx) {
    if (!j.contains("chart")) {
        ctx.err("chart", "missing required field");
        return;
    }
    const json& c = j["chart"];
    if (!require_object(c, "chart", ctx)) return;
    spec.dim = get_int(c, "dim", "chart", ctx, true, 1);
    if (spec.dim < 1 || spec.dim > 8) {
        ctx.err("chart.dim", "must be between 1 and 8");
        spec.dim = 1;
    }
    bool has_name = c.contains("potential");
    bool has_coeffs = c.contains("coefficients");
    if (has_name == has_coeffs) {
        ctx.err("chart", "exactly one of \"potential\" and \"coefficients\" is required");
        return;
    }
    if (has_name) {
        if (!c["potential"].is_string()) {
            ctx.err("chart.potential", "expected a built-in potential name");
            return;
        }
        spec.potential_name = c["potential"].get<std::string>();
        const auto& names = builtin_names();
        if (std::find(names.begin(), names.end(), spec.potential_name) == names.end()) {
            std::string all;
            for (const auto& nm : names) all += (all.empty() ? "" : ", ") + nm;
            ctx.err("chart.potential", "unknown potential \"" + spec.potential_name +
                                           "\"; known: " + all);
        }
    } else {
        spec.potential = get_poly(c["coefficients"], spec.dim, "chart.coefficients", ctx);
    }
}

void parse_truncation(const json& j, ProblemSpec& spec, Ctx& ctx) {
    if (!j.contains("truncation")) {
        ctx.err("truncation", "missing required field");
        return;
    }
    const json& t = j["truncation"];
    if (!require_object(t, "truncation", ctx)) return;
    int lam = get_int(t, "lambda_order", "truncation", ctx, true, 2);
    if (lam < 1) ctx.err("truncation.lambda_order", "must be at least 1");
    int cap = get_int(t, "total_degree_cap", "truncation", ctx, false, 2 * lam);
    int jet = get_int(t, "jet_order", "truncation", ctx, false, cap + 2);
    if (cap < 3) ctx.err("truncation.total_degree_cap", "must be at least 3");
    if (jet < cap + 2)
        ctx.err("truncation.jet_order",
                "must be at least total_degree_cap + 2 = " + std::to_string(cap + 2));
    spec.pol.lambda_order = lam;
    spec.pol.total_cap = cap;
    spec.pol.jet_order = jet;
}

void parse_omega(const json& j, ProblemSpec& spec, Ctx& ctx) {
    if (!j.contains("omega")) return;
    const json& o = j["omega"];
    if (!o.is_array()) {
        ctx.err("omega", "expected an array of formal-parameter terms");
        return;
    }
    for (size_t t = 0; t < o.size(); ++t) {
        std::string tp = "omega[" + std::to_string(t) + "]";
        const json& e = o[t];
        if (!require_object(e, tp, ctx)) continue;
        ProblemSpec::OmegaTerm term;
        term.lambda = get_int(e, "lambda", tp, ctx, true, 1);
        if (term.lambda < 1) ctx.err(tp + ".lambda", "must be at least 1");
        term.kaehler = e.contains("kaehler") && e["kaehler"].is_boolean() &&
                       e["kaehler"].get<bool>();
        if (term.kaehler == e.contains("entries")) {
            ctx.err(tp, "exactly one of \"kaehler\" and \"entries\" is required");
            continue;
        }
        if (!term.kaehler) {
            const json& ent = e["entries"];
            if (!ent.is_array()) {
                ctx.err(tp + ".entries", "expected an array");
                continue;
            }
            for (size_t q = 0; q < ent.size(); ++q) {
                std::string qp = tp + ".entries[" + std::to_string(q) + "]";
                const json& en = ent[q];
                if (!require_object(en, qp, ctx)) continue;
                int i = get_int(en, "i", qp, ctx, true, 0);
                int jj = get_int(en, "j", qp, ctx, true, 0);
                if (i < 0 || jj < 0 || i >= 2 * spec.dim || jj >= 2 * spec.dim || i >= jj) {
                    ctx.err(qp, "generator indices must satisfy 0 <= i < j < " +
                                    std::to_string(2 * spec.dim));
                    continue;
                }
                if (!en.contains("poly")) {
                    ctx.err(qp + ".poly", "missing required field");
                    continue;
                }
                term.entries.emplace_back(i, jj,
                                          get_poly(en["poly"], spec.dim, qp + ".poly", ctx));
            }
        }
        spec.omega.push_back(std::move(term));
    }
}

void parse_bundle(const json& j, ProblemSpec& spec, Ctx& ctx) {
    if (!j.contains("bundle")) return;
    const json& b = j["bundle"];
    if (!require_object(b, "bundle", ctx)) return;
    ProblemSpec::BundleSpec bs;
    bs.rank = get_int(b, "rank", "bundle", ctx, true, 1);
    if (bs.rank < 1 || bs.rank > 8) ctx.err("bundle.rank", "must be between 1 and 8");
    std::string kind = b.contains("kind") && b["kind"].is_string()
                           ? b["kind"].get<std::string>()
                           : std::string();
    if (kind == "holomorphic")
        bs.kind = BundleKind::Holomorphic;
    else if (kind == "antiholomorphic")
        bs.kind = BundleKind::AntiHolomorphic;
    else
        ctx.err("bundle.kind", "expected \"holomorphic\" or \"antiholomorphic\"");
    if (!b.contains("fibre_metric")) {
        ctx.err("bundle.fibre_metric", "missing required field");
        return;
    }
    if (bs.rank >= 1 && bs.rank <= 8)
        bs.metric = get_poly_matrix(b["fibre_metric"], bs.rank, bs.rank, spec.dim,
                                    "bundle.fibre_metric", ctx);
    if (b.contains("transition"))
        bs.transition = get_poly_matrix(b["transition"], bs.rank, bs.rank, spec.dim,
                                        "bundle.transition", ctx);
    spec.bundle = std::move(bs);
}

void parse_tasks(const json& j, ProblemSpec& spec, Ctx& ctx) {
    if (!j.contains("tasks")) {
        ctx.err("tasks", "missing required field");
        return;
    }
    const json& ts = j["tasks"];
    if (!ts.is_array() || ts.empty()) {
        ctx.err("tasks", "expected a non-empty array");
        return;
    }
    for (size_t t = 0; t < ts.size(); ++t) {
        std::string tp = "tasks[" + std::to_string(t) + "]";
        const json& e = ts[t];
        if (!require_object(e, tp, ctx)) continue;
        std::string type = e.contains("type") && e["type"].is_string()
                               ? e["type"].get<std::string>()
                               : std::string();
        ProblemSpec::Task task;
        if (type == "star") {
            task.kind = ProblemSpec::Task::Kind::Star;
            if (!e.contains("f") || !e.contains("g")) {
                ctx.err(tp, "star tasks need \"f\" and \"g\" polynomials");
                continue;
            }
            task.f = get_poly(e["f"], spec.dim, tp + ".f", ctx);
            task.g = get_poly(e["g"], spec.dim, tp + ".g", ctx);
        } else if (type == "verify") {
            task.kind = ProblemSpec::Task::Kind::Verify;
            if (e.contains("suites")) {
                if (!e["suites"].is_array()) {
                    ctx.err(tp + ".suites", "expected an array of suite names");
                    continue;
                }
                for (size_t q = 0; q < e["suites"].size(); ++q) {
                    const json& s = e["suites"][q];
                    std::string sp = tp + ".suites[" + std::to_string(q) + "]";
                    if (!s.is_string()) {
                        ctx.err(sp, "expected a suite name");
                        continue;
                    }
                    const auto& names = suite_names();
                    std::string nm = s.get<std::string>();
                    if (std::find(names.begin(), names.end(), nm) == names.end())
                        ctx.err(sp, "unknown suite \"" + nm + "\"");
                    else
                        task.suites.push_back(nm);
                }
            }
            if (e.contains("seed")) {
                if (!e["seed"].is_number_unsigned())
                    ctx.err(tp + ".seed", "expected a nonnegative integer");
                else
                    task.seed = e["seed"].get<std::uint64_t>();
            }
        } else if (type == "dump-r") {
            task.kind = ProblemSpec::Task::Kind::DumpR;
        } else {
            ctx.err(tp + ".type", "expected \"star\", \"verify\" or \"dump-r\"");
            continue;
        }
        spec.tasks.push_back(std::move(task));
    }
}

SuiteConfig suite_config(const ProblemSpec& spec, std::uint64_t seed) {
    SuiteConfig cfg;
    cfg.chart = spec.potential_name;
    cfg.potential = spec.potential;
    cfg.n = spec.dim;
    cfg.kappa = spec.kappa;
    cfg.with_omega = !spec.omega.empty();
    cfg.pol = spec.pol;
    cfg.seed = seed;
    cfg.sabotage_curvature_sign = spec.sabotage_curvature_sign;
    return cfg;
}

} // namespace

std::string format_diagnostic(const Diagnostic& d) { return d.path + ": " + d.message; }

ParseResult parse_spec_text(const std::string& text) {
    ParseResult res;
    std::vector<Diagnostic>& diags = res.diagnostics;
    Ctx ctx{diags};
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        ctx.err("$", "not well-formed JSON");
        return res;
    }
    if (!j.is_object()) {
        ctx.err("$", "expected a top-level object");
        return res;
    }
    ProblemSpec spec;
    spec.version = get_int(j, "version", "$", ctx, true, 1);
    if (spec.version != 1) ctx.err("version", "unsupported schema version");
    parse_chart(j, spec, ctx);
    parse_truncation(j, spec, ctx);
    if (j.contains("kappa"))
        spec.kappa = get_rational(j["kappa"], "kappa", ctx);
    else
        ctx.err("kappa", "missing required field");
    parse_omega(j, spec, ctx);
    parse_bundle(j, spec, ctx);
    parse_tasks(j, spec, ctx);
    if (j.contains("debug") && j["debug"].is_object()) {
        const json& d = j["debug"];
        if (d.contains("sabotage_curvature_sign") &&
            d["sabotage_curvature_sign"].is_boolean())
            spec.sabotage_curvature_sign = d["sabotage_curvature_sign"].get<bool>();
    }
    if (!diags.empty()) return res;

    // structural pass done; validate the module preconditions by building
    try {
        ProblemInstance inst = build_instance(spec);
        if (!inst.Omega.is_zero()) {
            if (!weyl_exterior_d(inst.Omega).is_zero())
                ctx.err("omega", "the coefficient forms are not closed");
            if (spec.kappa != 0 && !is_type_one_one(inst.Omega))
                ctx.err("omega", "must be of type (1,1) when kappa is nonzero");
        }
    } catch (const NonHermitianMetric& e) {
        ctx.err("bundle.fibre_metric", e.what());
    } catch (const NotInvertible& e) {
        ctx.err("bundle.fibre_metric", e.what());
    } catch (const DegenerateMetric& e) {
        ctx.err("chart", e.what());
    } catch (const EngineError& e) {
        ctx.err("$", e.what());
    }
    if (diags.empty()) res.spec = std::move(spec);
    return res;
}

ParseResult parse_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        ParseResult res;
        res.diagnostics.push_back({"$", "cannot open file: " + path});
        return res;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_spec_text(buf.str());
}

std::string serialize_spec(const ProblemSpec& spec) {
    json j;
    j["version"] = spec.version;
    j["chart"]["dim"] = spec.dim;
    if (spec.potential)
        j["chart"]["coefficients"] = poly_json(*spec.potential);
    else
        j["chart"]["potential"] = spec.potential_name;
    j["truncation"] = {{"lambda_order", spec.pol.lambda_order},
                       {"total_degree_cap", spec.pol.total_cap},
                       {"jet_order", spec.pol.jet_order}};
    j["kappa"] = rational_str(spec.kappa);
    if (!spec.omega.empty()) {
        json arr = json::array();
        for (const auto& term : spec.omega) {
            json e;
            e["lambda"] = term.lambda;
            if (term.kaehler) {
                e["kaehler"] = true;
            } else {
                json ents = json::array();
                for (const auto& [i, jj, poly] : term.entries)
                    ents.push_back({{"i", i}, {"j", jj}, {"poly", poly_json(poly)}});
                e["entries"] = std::move(ents);
            }
            arr.push_back(std::move(e));
        }
        j["omega"] = std::move(arr);
    }
    if (spec.bundle) {
        json b;
        b["rank"] = spec.bundle->rank;
        b["kind"] = spec.bundle->kind == BundleKind::Holomorphic ? "holomorphic"
                                                                 : "antiholomorphic";
        b["fibre_metric"] = poly_matrix_json(spec.bundle->metric);
        if (spec.bundle->transition)
            b["transition"] = poly_matrix_json(*spec.bundle->transition);
        j["bundle"] = std::move(b);
    }
    json tasks = json::array();
    for (const auto& t : spec.tasks) {
        json e;
        switch (t.kind) {
        case ProblemSpec::Task::Kind::Star:
            e["type"] = "star";
            e["f"] = poly_json(t.f);
            e["g"] = poly_json(t.g);
            break;
        case ProblemSpec::Task::Kind::Verify:
            e["type"] = "verify";
            if (!t.suites.empty()) e["suites"] = t.suites;
            e["seed"] = t.seed;
            break;
        case ProblemSpec::Task::Kind::DumpR:
            e["type"] = "dump-r";
            break;
        }
        tasks.push_back(std::move(e));
    }
    j["tasks"] = std::move(tasks);
    if (spec.sabotage_curvature_sign) j["debug"]["sabotage_curvature_sign"] = true;
    return j.dump(2) + "\n";
}

ProblemInstance build_instance(const ProblemSpec& spec) {
    ProblemInstance inst;
    Jet K = spec.potential
                ? *spec.potential
                : builtin_potential(spec.potential_name, spec.dim, spec.pol.jet_order + 2);
    inst.chart = chart_from_potential(K, spec.dim, spec.pol, spec.sabotage_curvature_sign);
    if (spec.bundle)
        inst.bundle = bundle_from_metric(spec.bundle->metric, spec.bundle->kind, inst.chart);
    inst.Omega = WeylElement::scalar(spec.dim, spec.pol);
    for (const auto& term : spec.omega) {
        if (term.kaehler) {
            inst.Omega += inst.chart.omega.times_lambda(term.lambda);
            continue;
        }
        for (const auto& [i, jj, poly] : term.entries) {
            WeylKey k;
            k.lambda = term.lambda;
            k.sym = Multi(static_cast<size_t>(2 * spec.dim), 0);
            k.asym = (1u << i) | (1u << jj);
            inst.Omega.add_term(k, poly.truncated(spec.pol.jet_order));
        }
    }
    return inst;
}

CommandResult cmd_star(const ProblemSpec& spec) {
    CommandResult res;
    std::ostringstream os;
    try {
        ProblemInstance inst = build_instance(spec);
        auto sol = solve_fedosov(inst.chart, nullptr, spec.kappa, inst.Omega, spec.pol);
        int idx = 0;
        for (const auto& t : spec.tasks) {
            int ti = idx++;
            if (t.kind != ProblemSpec::Task::Kind::Star) continue;
            WeylElement p = star(WeylElement::from_jet(t.f.truncated(spec.pol.jet_order),
                                                       spec.pol),
                                 WeylElement::from_jet(t.g.truncated(spec.pol.jet_order),
                                                       spec.pol),
                                 sol);
            os << "task " << ti << " star\n";
            for (int lam = 0; lam <= spec.pol.lambda_order; ++lam) {
                WeylKey k;
                k.lambda = lam;
                k.sym = Multi(static_cast<size_t>(2 * spec.dim), 0);
                os << "  lambda^" << lam << ":\n";
                auto it = p.terms().find(k);
                if (it == p.terms().end() || it->second.at(0, 0).is_zero()) {
                    os << "    0\n";
                    continue;
                }
                for (const auto& [m, c] : it->second.at(0, 0).coeffs())
                    os << "    " << mono_str(m, spec.dim) << " : " << c.str() << "\n";
            }
        }
        res.output = os.str();
        res.exit_code = 0;
    } catch (const EngineError& e) {
        res.output = std::string("error: ") + e.what() + "\n";
        res.exit_code = 2;
    }
    return res;
}

CommandResult cmd_verify(const ProblemSpec& spec, const std::vector<std::string>& suites,
                         std::optional<std::uint64_t> seed) {
    CommandResult res;
    std::ostringstream os;
    std::vector<std::string> selected = suites;
    std::uint64_t use_seed = seed.value_or(1);
    if (selected.empty()) {
        for (const auto& t : spec.tasks) {
            if (t.kind != ProblemSpec::Task::Kind::Verify) continue;
            if (!seed) use_seed = t.seed;
            const auto& from = t.suites.empty() ? suite_names() : t.suites;
            for (const auto& s : from)
                if (std::find(selected.begin(), selected.end(), s) == selected.end())
                    selected.push_back(s);
        }
    }
    if (selected.empty()) selected = suite_names();
    bool any_fail = false, any_setup = false;
    try {
        for (const auto& name : selected) {
            for (const auto& r : run_suite(name, suite_config(spec, use_seed))) {
                os << format_report(r) << "\n";
                if (!r.pass) {
                    any_fail = true;
                    if (r.id.size() >= 6 && r.id.substr(r.id.size() - 6) == ".setup")
                        any_setup = true;
                }
            }
        }
    } catch (const EngineError& e) {
        res.output = os.str() + "error: " + e.what() + "\n";
        res.exit_code = 2;
        return res;
    }
    res.output = os.str();
    res.exit_code = any_setup ? 2 : (any_fail ? 1 : 0);
    return res;
}

CommandResult cmd_dump_r(const ProblemSpec& spec) {
    CommandResult res;
    std::ostringstream os;
    try {
        ProblemInstance inst = build_instance(spec);
        const BundleChart* b = inst.bundle ? &*inst.bundle : nullptr;
        auto sol = solve_fedosov(inst.chart, b, spec.kappa, inst.Omega, spec.pol);
        dump_element(os, sol.r, "r");
        if (b) {
            dump_element(os, sol.r_prime, "r-prime");
            dump_element(os, sol.r_E, "r-bundle");
        }
        res.output = os.str();
        res.exit_code = 0;
    } catch (const EngineError& e) {
        res.output = std::string("error: ") + e.what() + "\n";
        res.exit_code = 2;
    }
    return res;
}

} // namespace wick
