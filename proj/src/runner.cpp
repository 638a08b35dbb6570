#include "hypotor/runner.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

namespace hypotor {

namespace {

// decimal scientific string from a log2 magnitude (plot-friendly for values
// far outside double range)
std::string sci_from_log2(double log2v) {
    if (!std::isfinite(log2v)) return log2v < 0 ? "0" : "inf";
    double e10 = log2v * 0.30102999566398119521;
    double expo = std::floor(e10);
    double mant = std::pow(10.0, e10 - expo);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6fe%+d", mant, static_cast<int>(expo));
    return buf;
}

Json mn_structure_json(const MnStructure& s) {
    Json j;
    j["kind"] = to_string(s.kind);
    if (s.step) j["step"] = s.step->str();
    if (s.lines) {
        Json fam;
        fam["family"] = s.lines->kind == LineFamily::Kind::HorizontalT ? "t" : "ell";
        fam["spacing"] = exact_to_json(s.lines->spacing);
        fam["description"] = s.lines->description;
        j["lines"] = fam;
    }
    if (!s.reason.empty()) j["reason"] = s.reason;
    return j;
}

Json point_json(const LatticePoint& pt) {
    Json j;
    j["tau"] = pt.tau.get_str();
    Json xs = Json::array();
    for (const auto& x : pt.xi) xs.push_back(x.get_str());
    j["xi"] = xs;
    return j;
}

Json classification_json(const ClassificationReport& rep) {
    Json j;
    j["mn"] = mn_structure_json(rep.mn);
    j["nn"] = mn_structure_json(rep.nn);
    j["base_gh"] = to_string(rep.base_gh);
    j["base_gh_reason"] = rep.base_gh_reason;
    Json certs = Json::array();
    if (rep.gcd_certificate) {
        Json c;
        c["kind"] = "gcd-lattice";
        c["Q"] = rep.gcd_certificate->Q.get_str();
        Json nums = Json::array();
        for (const auto& x : rep.gcd_certificate->scaled_numerators) nums.push_back(x.get_str());
        c["scaled_numerators"] = nums;
        c["divisor"] = rep.gcd_certificate->divisor.get_str();
        certs.push_back(c);
    }
    if (rep.density_certificate) {
        Json c;
        c["kind"] = "kronecker-density";
        c["k"] = rep.density_certificate->k;
        Json rows = Json::array();
        for (const auto& row : rep.density_certificate->A) {
            Json r = Json::array();
            for (const auto& e : row) r.push_back(exact_to_json(e));
            rows.push_back(r);
        }
        c["A"] = rows;
        c["dense"] = rep.density_certificate->dense;
        if (!rep.density_certificate->dense) {
            Json r = Json::array();
            for (const auto& x : rep.density_certificate->nondensity_r) r.push_back(x.str());
            c["r"] = r;
        }
        certs.push_back(c);
    }
    for (const auto& w : rep.witnesses) {
        Json c;
        c["kind"] = "witness";
        c["j"] = w.j;
        c["point"] = point_json(w.point);
        c["lhs_sq"] = w.lhs_sq.str();
        c["rhs_sq"] = w.rhs_sq.str();
        certs.push_back(c);
    }
    j["certificates"] = certs;
    return j;
}

Json shells_json(const std::vector<ShellRecord>& recs) {
    Json rows = Json::array();
    for (const auto& r : recs) {
        Json e;
        e["r"] = r.r;
        e["min_sq_lo"] = decimal_or_fraction(r.min_sq.lo);
        e["min_sq_hi"] = decimal_or_fraction(r.min_sq.hi);
        e["exact"] = r.exact;
        e["argmin"] = point_json(r.argmin);
        e["is_zero"] = r.is_exact_zero;
        rows.push_back(e);
    }
    return rows;
}

// FourierSolution with complex samples as [re, im] pairs; factored modes
// carry their slow factor, resolvable ones the plain samples.
Json solution_json(const FourierSolution& sol) {
    Json j;
    j["grid"] = sol.grid;
    j["kind"] = sol.kind;
    Json modes = Json::array();
    for (const auto& m : sol.modes) {
        Json e;
        Json eta = Json::array();
        for (const auto& x : m.eta) eta.push_back(x.get_str());
        e["eta"] = eta;
        e["t_n"] = m.t_n;
        e["factored"] = !m.resolvable;
        const auto& samples = m.resolvable && !m.full.empty() ? m.full : m.slow;
        Json ss = Json::array();
        for (const auto& v : samples) ss.push_back(Json::array({v.real(), v.imag()}));
        e["samples"] = ss;
        modes.push_back(std::move(e));
    }
    j["modes"] = modes;
    return j;
}

Json run_one_task(const SpecFile& spec, const Task& t) {
    Json out;
    out["id"] = t.id;
    out["kind"] = to_string(t.kind);
    out["op"] = t.op;
    switch (t.kind) {
        case TaskKind::Classify: {
            const OperatorSpec& op = spec.operators.at(t.op);
            out["outcome"] = classification_json(classify_MN(op));
            break;
        }
        case TaskKind::BaseGh: {
            const OperatorSpec& op = spec.operators.at(t.op);
            std::string reason;
            GhStatus s = base_gh_status(op, &reason);
            Json o;
            o["status"] = to_string(s);
            o["reason"] = reason;
            out["outcome"] = o;
            break;
        }
        case TaskKind::Scan: {
            const OperatorSpec& op = spec.operators.at(t.op);
            auto recs = scan_shells(op, t.r_max);
            Json o;
            o["r_max"] = t.r_max;
            o["shells"] = shells_json(recs);
            out["outcome"] = o;
            break;
        }
        case TaskKind::Fit: {
            const OperatorSpec& op = spec.operators.at(t.op);
            auto recs = scan_shells(op, t.r_max);
            ExponentFit fit = fit_exponent(recs);
            Json o;
            o["r_max"] = t.r_max;
            o["C_hat"] = fit.C_hat;
            o["M_hat"] = fit.M_hat;
            o["residual"] = fit.residual;
            o["R_used"] = fit.R_used;
            o["points_used"] = fit.points_used;
            out["outcome"] = o;
            break;
        }
        case TaskKind::Witness: {
            const OperatorSpec& op = spec.operators.at(t.op);
            WitnessBudget budget;
            budget.r_max = t.r_max;
            budget.cf_depth = t.cf_depth;
            budget.truncation_depth = t.truncation_depth;
            auto w = find_witness(op, t.j, budget);
            Json o;
            o["j"] = t.j;
            o["budget"] =
                Json{{"r_max", t.r_max}, {"cf_depth", t.cf_depth},
                     {"truncation_depth", t.truncation_depth}};
            o["found"] = w.has_value();
            if (w) {
                o["point"] = point_json(w->point);
                o["lhs_sq"] = w->lhs_sq.str();
                o["rhs_sq"] = w->rhs_sq.str();
                o["verified"] = verify_witness(op, *w);
            } else {
                o["note"] = "none within budget";
            }
            out["outcome"] = o;
            out["budget_miss"] = !w.has_value();
            break;
        }
        case TaskKind::Approx: {
            const OperatorSpec& op = spec.operators.at(t.op);
            auto hit = kronecker_approximate(op.alphas, *t.z, t.eps, t.bound);
            Json o;
            o["z"] = complex_to_json(*t.z);
            o["eps"] = t.eps.str();
            o["bound"] = t.bound;
            o["found"] = hit.has_value();
            if (hit) {
                o["ell"] = hit->ell.get_str();
                Json ms = Json::array();
                for (const auto& m : hit->m) ms.push_back(m.get_str());
                o["m"] = ms;
                o["n"] = hit->n.get_str();
                o["k"] = hit->k + 1;
                o["dist_sq_hi"] = hit->dist_sq_hi.str();
            } else {
                o["note"] = "none within bound";
            }
            out["outcome"] = o;
            out["budget_miss"] = !hit.has_value();
            break;
        }
        case TaskKind::Construct: {
            const TubeOperatorSpec& tube = spec.tubes.at(t.op);
            auto seq = find_eta_sequence(tube, t.n_max);
            Json o;
            o["n_max"] = t.n_max;
            o["grid"] = t.grid;
            o["sequence_complete"] = seq.complete;
            if (!seq.note.empty()) o["sequence_note"] = seq.note;
            Json entries = Json::array();
            for (const auto& e : seq.entries) {
                Json je;
                je["n"] = e.n;
                Json eta = Json::array();
                for (const auto& x : e.eta) eta.push_back(x.get_str());
                je["eta"] = eta;
                je["exact_resonance"] = e.exact;
                je["bound"] = e.exact ? "0" : sci_from_log2(e.bound_log2);
                je["threshold_log2"] = log2_rat(e.threshold);
                entries.push_back(je);
            }
            o["entries"] = entries;
            if (seq.entries.empty()) {
                o["branch"] = "none";
                out["outcome"] = o;
                out["budget_miss"] = true;
                break;
            }
            if (seq.all_exact()) {
                o["branch"] = "homogeneous";
                auto mu = build_homogeneous_singular(tube, seq, t.grid);
                auto rep = apply_operator(tube, mu);
                Json rows = Json::array();
                for (size_t i = 0; i < mu.modes.size(); ++i) {
                    Json row;
                    row["n"] = seq.entries[i].n;
                    Json eta = Json::array();
                    for (const auto& x : mu.modes[i].eta) eta.push_back(x.get_str());
                    row["eta"] = eta;
                    row["sup"] = mu.modes[i].sup_grid;
                    row["t_n"] = mu.modes[i].t_n;
                    row["residual"] = rep.modes[i].residual;
                    rows.push_back(row);
                }
                o["modes"] = rows;
                o["max_residual"] = rep.max_residual;
                o["smoothness"] = to_string(smoothness_diagnostic(mu).label);
                o["solution"] = solution_json(mu);
                out["outcome"] = o;
            } else if (seq.all_nonresonant()) {
                o["branch"] = "pair";
                BumpSpec bump = choose_bump(tube, seq, t.grid);
                auto pair = build_pair(tube, seq, bump, t.grid);
                auto rep = apply_operator(tube, pair.u, &pair.f);
                o["bump"] = Json{{"center", bump.center}, {"half_width", bump.half_width}};
                o["phi_integral"] = pair.phi_integral;
                Json rows = Json::array();
                for (size_t i = 0; i < pair.f.modes.size(); ++i) {
                    Json row;
                    row["n"] = seq.entries[i].n;
                    Json eta = Json::array();
                    for (const auto& x : pair.f.modes[i].eta) eta.push_back(x.get_str());
                    row["eta"] = eta;
                    row["sup_f"] = sci_from_log2(pair.f.modes[i].sup_log2);
                    row["sup_u"] = pair.u.modes[i].sup_grid;
                    row["u_at_tn"] = pair.u.modes[i].value_at_tn;
                    row["t_n"] = pair.f.modes[i].t_n;
                    row["residual"] = rep.modes[i].residual;
                    rows.push_back(row);
                }
                o["modes"] = rows;
                o["max_residual"] = rep.max_residual;
                o["smoothness_f"] = to_string(smoothness_diagnostic(pair.f).label);
                o["smoothness_u"] = to_string(smoothness_diagnostic(pair.u).label);
                o["solution_f"] = solution_json(pair.f);
                o["solution_u"] = solution_json(pair.u);
                out["outcome"] = o;
            } else {
                o["branch"] = "mixed";
                o["note"] = "sequence mixes exact and non-resonant entries";
                out["outcome"] = o;
            }
            break;
        }
    }
    return out;
}

}  // namespace

RunResult run_spec(const SpecFile& spec, const RunOptions& opts) {
    auto start = std::chrono::steady_clock::now();
    std::vector<const Task*> selected;
    for (const auto& t : spec.tasks) {
        if (opts.only.empty() ||
            std::find(opts.only.begin(), opts.only.end(), t.id) != opts.only.end())
            selected.push_back(&t);
    }
    RunResult result;
    std::vector<Json> outcomes(selected.size());
    int exit_code = kExitOk;
    auto run_at = [&](size_t i) { outcomes[i] = run_one_task(spec, *selected[i]); };
    try {
        if (opts.parallel) {
            std::vector<std::future<void>> futs;
            for (size_t i = 0; i < selected.size(); ++i)
                futs.push_back(std::async(std::launch::async, run_at, i));
            for (auto& f : futs) f.get();
        } else {
            for (size_t i = 0; i < selected.size(); ++i) run_at(i);
        }
    } catch (const PreconditionViolation& e) {
        result.report["error"] = std::string("precondition violation: ") + e.what();
        result.exit_code = kExitPrecondition;
    } catch (const RefinementExhausted& e) {
        result.report["error"] = std::string("refinement exhausted: ") + e.what();
        result.exit_code = kExitRefinementExhausted;
    }

    Json report;
    report["schema"] = "hypotor-report/1";
    report["tool"] = "hypotor 1.0.0";
    Json tasks = Json::array();
    for (size_t i = 0; i < selected.size(); ++i) {
        if (outcomes[i].is_null()) continue;
        tasks.push_back(outcomes[i]);
        if (selected[i]->require && outcomes[i].value("budget_miss", false))
            exit_code = std::max(exit_code, kExitNoneWithinBudget);
    }
    report["tasks"] = tasks;
    if (result.report.contains("error")) report["error"] = result.report["error"];
    auto end = std::chrono::steady_clock::now();
    report["wall_clock_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(end - start).count();
    result.report = report;
    if (result.exit_code == kExitOk) result.exit_code = exit_code;

    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        std::ofstream rf(opts.out_dir + "/report.json", std::ios::binary);
        rf << report_to_string(result.report);
        for (auto [table, name] : {std::pair{CsvTable::Shells, "shells.csv"},
                                   std::pair{CsvTable::Modes, "modes.csv"},
                                   std::pair{CsvTable::Fits, "fits.csv"}}) {
            try {
                std::string csv = render_csv(result.report, table);
                std::ofstream cf(opts.out_dir + "/" + name, std::ios::binary);
                cf << csv;
            } catch (const PreconditionViolation&) {
                // table absent from this run
            }
        }
    }
    return result;
}

RunResult run_file(const std::string& path, const RunOptions& opts) {
    SpecFile spec = parse_spec_file(path);
    return run_spec(spec, opts);
}

std::string report_to_string(const Json& report) { return report.dump(2) + "\n"; }

std::string render_csv(const Json& report, CsvTable which) {
    std::ostringstream out;
    const Json& tasks = report.contains("tasks") ? report.at("tasks") : Json::array();
    bool found = false;
    switch (which) {
        case CsvTable::Shells: {
            for (const auto& t : tasks) {
                if (t.value("kind", "") != "scan") continue;
                const Json& shells = t.at("outcome").at("shells");
                if (!found) {
                    size_t nxi = shells.empty() ? 1 : shells[0].at("argmin").at("xi").size();
                    out << "r,min_modulus_sq_lo,min_modulus_sq_hi,tau";
                    for (size_t i = 1; i <= nxi; ++i) out << ",xi" << i;
                    out << ",is_zero\n";
                }
                found = true;
                for (const auto& row : shells) {
                    out << row.at("r").get<long>() << "," << row.at("min_sq_lo").get<std::string>()
                        << "," << row.at("min_sq_hi").get<std::string>() << ","
                        << row.at("argmin").at("tau").get<std::string>();
                    for (const auto& x : row.at("argmin").at("xi"))
                        out << "," << x.get<std::string>();
                    out << "," << (row.at("is_zero").get<bool>() ? 1 : 0) << "\n";
                }
            }
            break;
        }
        case CsvTable::Modes: {
            for (const auto& t : tasks) {
                if (t.value("kind", "") != "construct") continue;
                const Json& o = t.at("outcome");
                if (!o.contains("modes")) continue;
                const Json& modes = o.at("modes");
                if (modes.empty()) continue;
                bool pair = o.value("branch", "") == "pair";
                if (!found) {
                    size_t neta = modes[0].at("eta").size();
                    out << "n";
                    for (size_t i = 1; i <= neta; ++i) out << ",eta" << i;
                    out << (pair ? ",sup_f,sup_u,u_at_tn" : ",sup,residual") << "\n";
                }
                found = true;
                for (const auto& row : modes) {
                    out << row.at("n").get<long>();
                    for (const auto& x : row.at("eta")) out << "," << x.get<std::string>();
                    if (pair) {
                        out << "," << row.at("sup_f").get<std::string>() << ","
                            << row.at("sup_u").get<double>() << ","
                            << row.at("u_at_tn").get<double>();
                    } else {
                        out << "," << row.at("sup").get<double>() << ","
                            << row.at("residual").get<double>();
                    }
                    out << "\n";
                }
            }
            break;
        }
        case CsvTable::Fits: {
            for (const auto& t : tasks) {
                if (t.value("kind", "") != "fit") continue;
                const Json& o = t.at("outcome");
                if (!found) out << "C_hat,M_hat,residual,R_used\n";
                found = true;
                out << o.at("C_hat").get<double>() << "," << o.at("M_hat").get<double>() << ","
                    << o.at("residual").get<double>() << "," << o.at("R_used").get<long>() << "\n";
            }
            break;
        }
    }
    if (!found) throw PreconditionViolation("requested table not present in the report");
    return out.str();
}

}  // namespace hypotor
