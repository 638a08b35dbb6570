#include "hypotor/specfile.hpp"

#include <fstream>

namespace hypotor {

std::string to_string(TaskKind k) {
    switch (k) {
        case TaskKind::Classify: return "classify";
        case TaskKind::Scan: return "scan";
        case TaskKind::Witness: return "witness";
        case TaskKind::Fit: return "fit";
        case TaskKind::Approx: return "approx";
        case TaskKind::Construct: return "construct";
        case TaskKind::BaseGh: return "base_gh";
    }
    return "classify";
}

namespace {

TaskKind task_kind_from(const std::string& s, const std::string& where) {
    if (s == "classify") return TaskKind::Classify;
    if (s == "scan") return TaskKind::Scan;
    if (s == "witness") return TaskKind::Witness;
    if (s == "fit") return TaskKind::Fit;
    if (s == "approx") return TaskKind::Approx;
    if (s == "construct") return TaskKind::Construct;
    if (s == "base_gh") return TaskKind::BaseGh;
    throw ParseError(where + ": unknown task kind '" + s + "'");
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ParseError(where + ": " + what);
}

// Exact real literal: "p/q" / "1.25" string, or {"1": "p/q", "<name>": "p/q"}.
// Bare JSON numbers are rejected: exactness must be explicit.
ExactReal parse_exact(const Json& j, const BasisPtr& basis, const std::string& where) {
    if (j.is_number())
        fail(where, "bare numeric literal; write exact strings like \"1/3\" or \"0.25\"");
    if (j.is_string()) return ExactReal::from_rat(basis, parse_rat(j.get<std::string>()));
    if (j.is_object()) {
        std::vector<Rat> coords(basis->size() + 1, Rat(0));
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!it.value().is_string())
                fail(where, "coordinate '" + it.key() + "' must be an exact string");
            Rat v = parse_rat(it.value().get<std::string>());
            if (it.key() == "1") {
                coords[0] = v;
                continue;
            }
            auto idx = basis->find(it.key());
            if (!idx) fail(where, "unknown basis symbol '" + it.key() + "'");
            coords[*idx + 1] = v;
        }
        return ExactReal(basis, std::move(coords));
    }
    fail(where, "expected an exact literal");
}

ExactComplex parse_complex(const Json& j, const BasisPtr& basis, const std::string& where) {
    if (!j.is_object() || !j.contains("re") || !j.contains("im"))
        fail(where, "expected {\"re\": ..., \"im\": ...}");
    return {parse_exact(j.at("re"), basis, where + ".re"),
            parse_exact(j.at("im"), basis, where + ".im")};
}

BasisPtr parse_basis(const Json& j, const std::string& where) {
    std::vector<Atom> gens;
    if (!j.is_array()) fail(where, "basis must be an array");
    for (size_t i = 0; i < j.size(); ++i) {
        const Json& e = j[i];
        std::string w = where + "[" + std::to_string(i) + "]";
        Atom a;
        a.name = e.value("name", "");
        if (a.name.empty() || a.name == "1") fail(w, "atom needs a usable name");
        std::string kind = e.value("kind", "");
        if (kind == "sqrt") {
            a.kind = AtomKind::Sqrt;
            if (!e.contains("arg") || !e.at("arg").is_number_integer())
                fail(w, "sqrt atom needs integer 'arg'");
            a.sqrt_arg = e.at("arg").get<long>();
        } else if (kind == "liouville") {
            a.kind = AtomKind::Liouville;
            if (!e.contains("base") || !e.contains("depth")) fail(w, "liouville atom needs base/depth");
            a.liou_base = e.at("base").get<long>();
            a.liou_depth = e.at("depth").get<int>();
        } else if (kind == "opaque") {
            a.kind = AtomKind::Opaque;
            if (!e.contains("enclosure") || !e.at("enclosure").is_array() ||
                e.at("enclosure").size() != 2)
                fail(w, "opaque atom needs enclosure [lo, hi]");
            Rat lo = parse_rat(e.at("enclosure")[0].get<std::string>());
            Rat hi = parse_rat(e.at("enclosure")[1].get<std::string>());
            if (!(lo < hi)) fail(w, "opaque enclosure must have lo < hi");
            a.declared = RatInterval(lo, hi);
        } else {
            fail(w, "unknown atom kind '" + kind + "'");
        }
        if (e.contains("tag")) a.tag = dio_tag_from_string(e.at("tag").get<std::string>());
        gens.push_back(std::move(a));
    }
    return Basis::make(std::move(gens));
}

TrigPoly parse_trig(const Json& j, const BasisPtr& basis, const std::string& where) {
    TrigPoly p;
    if (!j.is_array()) fail(where, "trig polynomial must be an array of modes");
    for (size_t i = 0; i < j.size(); ++i) {
        const Json& e = j[i];
        std::string w = where + "[" + std::to_string(i) + "]";
        if (!e.contains("k") || !e.at("k").is_number_integer()) fail(w, "mode needs integer 'k'");
        p.add_mode(e.at("k").get<long>(), parse_complex(e, basis, w));
    }
    if (p.empty()) fail(where, "trig polynomial needs at least one mode");
    return p;
}

}  // namespace

SpecFile parse_spec_json(const Json& j, const std::string& where) {
    SpecFile out;
    out.version = j.value("version", "");
    if (out.version != "hypotor-spec/1")
        fail(where, "unsupported or missing version (want \"hypotor-spec/1\")");
    out.basis = j.contains("basis") ? parse_basis(j.at("basis"), where + ".basis")
                                    : Basis::rational_only();

    if (j.contains("operators")) {
        const Json& ops = j.at("operators");
        if (!ops.is_array()) fail(where, "operators must be an array");
        for (size_t i = 0; i < ops.size(); ++i) {
            const Json& e = ops[i];
            std::string w = where + ".operators[" + std::to_string(i) + "]";
            std::string id = e.value("id", "");
            if (id.empty()) fail(w, "operator needs an id");
            if (out.operators.count(id) || out.tubes.count(id)) fail(w, "duplicate id " + id);
            std::string type = e.value("type", "constant");
            if (type == "constant") {
                if (!e.contains("alphas") || !e.at("alphas").is_array() || e.at("alphas").empty())
                    fail(w, "constant operator needs alphas");
                std::vector<ExactComplex> alphas;
                for (size_t a = 0; a < e.at("alphas").size(); ++a)
                    alphas.push_back(parse_complex(e.at("alphas")[a], out.basis,
                                                   w + ".alphas[" + std::to_string(a) + "]"));
                ExactComplex lambda =
                    e.contains("lambda")
                        ? parse_complex(e.at("lambda"), out.basis, w + ".lambda")
                        : ExactComplex::from_rats(out.basis, Rat(0), Rat(0));
                out.operators.emplace(id, OperatorSpec::make(std::move(alphas), std::move(lambda)));
            } else if (type == "tube") {
                TubeOperatorSpec tube;
                if (!e.contains("c") || !e.at("c").is_array() || e.at("c").empty())
                    fail(w, "tube operator needs coefficient tables");
                for (size_t a = 0; a < e.at("c").size(); ++a)
                    tube.c.push_back(
                        parse_trig(e.at("c")[a], out.basis, w + ".c[" + std::to_string(a) + "]"));
                tube.N = static_cast<int>(tube.c.size());
                if (e.contains("lambda"))
                    tube.lambda = parse_trig(e.at("lambda"), out.basis, w + ".lambda");
                else
                    tube.lambda =
                        TrigPoly::constant(ExactComplex::from_rats(out.basis, Rat(0), Rat(0)));
                tube.validate();
                out.tubes.emplace(id, std::move(tube));
            } else {
                fail(w, "unknown operator type '" + type + "'");
            }
            out.operator_order.push_back(id);
        }
    }

    if (j.contains("tasks")) {
        const Json& ts = j.at("tasks");
        if (!ts.is_array()) fail(where, "tasks must be an array");
        for (size_t i = 0; i < ts.size(); ++i) {
            const Json& e = ts[i];
            std::string w = where + ".tasks[" + std::to_string(i) + "]";
            Task t;
            t.id = e.value("id", "task" + std::to_string(i + 1));
            t.kind = task_kind_from(e.value("kind", ""), w);
            t.op = e.value("op", "");
            if (t.op.empty()) fail(w, "task needs an operator id");
            bool constant_op = out.operators.count(t.op) > 0;
            bool tube_op = out.tubes.count(t.op) > 0;
            if (!constant_op && !tube_op) fail(w, "unknown operator '" + t.op + "'");
            t.require = e.value("require", false);
            auto need_int = [&](const char* key) -> long {
                if (!e.contains(key) || !e.at(key).is_number_integer())
                    fail(w, std::string("budget '") + key + "' is mandatory");
                return e.at(key).get<long>();
            };
            switch (t.kind) {
                case TaskKind::Classify:
                case TaskKind::BaseGh:
                    if (!constant_op) fail(w, "task needs a constant-coefficient operator");
                    break;
                case TaskKind::Scan:
                case TaskKind::Fit:
                    if (!constant_op) fail(w, "task needs a constant-coefficient operator");
                    t.r_max = need_int("r_max");
                    break;
                case TaskKind::Witness:
                    if (!constant_op) fail(w, "task needs a constant-coefficient operator");
                    t.j = static_cast<int>(need_int("j"));
                    t.r_max = need_int("r_max");
                    t.cf_depth = static_cast<int>(need_int("cf_depth"));
                    t.truncation_depth = static_cast<int>(need_int("truncation_depth"));
                    break;
                case TaskKind::Approx: {
                    if (!constant_op) fail(w, "task needs a constant-coefficient operator");
                    if (!e.contains("eps") || !e.at("eps").is_string())
                        fail(w, "budget 'eps' is mandatory (exact string)");
                    t.eps = parse_rat(e.at("eps").get<std::string>());
                    t.bound = need_int("bound");
                    if (!e.contains("z")) fail(w, "approx task needs a target z");
                    t.z = parse_complex(e.at("z"), out.basis, w + ".z");
                    break;
                }
                case TaskKind::Construct:
                    if (!tube_op) fail(w, "construct task needs a tube operator");
                    t.n_max = static_cast<int>(need_int("n_max"));
                    t.grid = static_cast<int>(need_int("grid"));
                    break;
            }
            out.tasks.push_back(std::move(t));
        }
    }
    return out;
}

SpecFile parse_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spec file: " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& e) {
        throw ParseError(std::string("json parse error: ") + e.what());
    }
    return parse_spec_json(j, path);
}

Json exact_to_json(const ExactReal& x) {
    Json coords = Json::object();
    coords["1"] = x.coords()[0].str();
    for (size_t i = 1; i < x.coords().size(); ++i) {
        if (x.coords()[i].is_zero()) continue;
        coords[x.basis()->atom(i - 1).name] = x.coords()[i].str();
    }
    Json out;
    out["coords"] = coords;
    out["approx"] = x.approx();
    return out;
}

Json complex_to_json(const ExactComplex& z) {
    Json out;
    out["re"] = exact_to_json(z.re);
    out["im"] = exact_to_json(z.im);
    return out;
}

namespace {

Json exact_literal(const ExactReal& x) {
    if (auto r = x.as_rational()) return r->str();
    Json coords = Json::object();
    if (!x.coords()[0].is_zero()) coords["1"] = x.coords()[0].str();
    for (size_t i = 1; i < x.coords().size(); ++i)
        if (!x.coords()[i].is_zero()) coords[x.basis()->atom(i - 1).name] = x.coords()[i].str();
    if (coords.empty()) coords["1"] = "0";
    return coords;
}

Json complex_literal(const ExactComplex& z) {
    Json out;
    out["re"] = exact_literal(z.re);
    out["im"] = exact_literal(z.im);
    return out;
}

Json trig_literal(const TrigPoly& p) {
    Json arr = Json::array();
    for (const auto& [k, c] : p.modes) {
        Json m = complex_literal(c);
        Json e;
        e["k"] = k;
        e["re"] = m["re"];
        e["im"] = m["im"];
        arr.push_back(e);
    }
    return arr;
}

}  // namespace

Json spec_to_json(const SpecFile& spec) {
    Json j;
    j["version"] = spec.version;
    Json basis = Json::array();
    for (size_t i = 0; i < spec.basis->generator_count(); ++i) {
        const Atom& a = spec.basis->atom(i);
        Json e;
        e["name"] = a.name;
        switch (a.kind) {
            case AtomKind::Sqrt:
                e["kind"] = "sqrt";
                e["arg"] = a.sqrt_arg;
                break;
            case AtomKind::Liouville:
                e["kind"] = "liouville";
                e["base"] = a.liou_base;
                e["depth"] = a.liou_depth;
                break;
            case AtomKind::Opaque:
                e["kind"] = "opaque";
                e["enclosure"] = Json::array({a.declared.lo.str(), a.declared.hi.str()});
                break;
        }
        e["tag"] = to_string(a.tag);
        basis.push_back(e);
    }
    j["basis"] = basis;
    Json ops = Json::array();
    for (const auto& id : spec.operator_order) {
        Json e;
        e["id"] = id;
        if (auto it = spec.operators.find(id); it != spec.operators.end()) {
            e["type"] = "constant";
            Json alphas = Json::array();
            for (const auto& a : it->second.alphas) alphas.push_back(complex_literal(a));
            e["alphas"] = alphas;
            e["lambda"] = complex_literal(it->second.lambda);
        } else {
            const TubeOperatorSpec& tube = spec.tubes.at(id);
            e["type"] = "tube";
            Json cs = Json::array();
            for (const auto& poly : tube.c) cs.push_back(trig_literal(poly));
            e["c"] = cs;
            e["lambda"] = trig_literal(tube.lambda);
        }
        ops.push_back(e);
    }
    j["operators"] = ops;
    Json tasks = Json::array();
    for (const auto& t : spec.tasks) {
        Json e;
        e["id"] = t.id;
        e["kind"] = to_string(t.kind);
        e["op"] = t.op;
        switch (t.kind) {
            case TaskKind::Scan:
            case TaskKind::Fit:
                e["r_max"] = t.r_max;
                break;
            case TaskKind::Witness:
                e["j"] = t.j;
                e["r_max"] = t.r_max;
                e["cf_depth"] = t.cf_depth;
                e["truncation_depth"] = t.truncation_depth;
                break;
            case TaskKind::Approx:
                e["z"] = complex_literal(*t.z);
                e["eps"] = t.eps.str();
                e["bound"] = t.bound;
                break;
            case TaskKind::Construct:
                e["n_max"] = t.n_max;
                e["grid"] = t.grid;
                break;
            default:
                break;
        }
        if (t.require) e["require"] = true;
        tasks.push_back(e);
    }
    j["tasks"] = tasks;
    return j;
}

}  // namespace hypotor
