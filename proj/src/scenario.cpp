#include "waylab/scenario.hpp"

#include "waylab/random.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

namespace waylab::scenario {

using opcore::op_norm;

json to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(json::array({m(i, j).real(), m(i, j).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json::array({v(i).real(), v(i).imag()}));
    return out;
}

namespace {

cplx entry_from_json(const json& e, const std::string& where) {
    if (e.is_number()) return {e.get<double>(), 0.0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<double>(), e[1].get<double>()};
    throw InputError(where + ": matrix entries must be numbers or [re, im] pairs");
}

}  // namespace

Mat matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw InputError(where + ": expected a non-empty array of rows");
    const size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) throw InputError(where + ": row 0 is not a non-empty array");
    const size_t cols = j[0].size();
    Mat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (size_t i = 0; i < rows; ++i) {
        if (!j[i].is_array() || j[i].size() != cols)
            throw InputError(where + ": row " + std::to_string(i) + " has the wrong length");
        for (size_t k = 0; k < cols; ++k)
            m(Eigen::Index(i), Eigen::Index(k)) =
                entry_from_json(j[i][k], where + "[" + std::to_string(i) + "][" + std::to_string(k) + "]");
    }
    return m;
}

Vec vector_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw InputError(where + ": expected a non-empty array");
    Vec v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i)
        v(Eigen::Index(i)) = entry_from_json(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

namespace {

bool is_scalar(const json& j) { return !j.is_array() && !j.is_object(); }

bool is_flat(const json& j) {
    if (!j.is_array()) return false;
    for (const auto& e : j) {
        if (is_scalar(e)) continue;
        if (!e.is_array()) return false;
        for (const auto& f : e)
            if (!is_scalar(f)) return false;
    }
    return true;
}

void emit(const json& j, std::string& out, int indent);

void emit_inline(const json& j, std::string& out) {
    if (j.is_array()) {
        out += '[';
        for (size_t i = 0; i < j.size(); ++i) {
            if (i) out += ", ";
            emit_inline(j[i], out);
        }
        out += ']';
        return;
    }
    emit(j, out, 0);
}

void emit(const json& j, std::string& out, int indent) {
    const std::string pad(size_t(indent) + 2, ' ');
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            return;
        }
        out += "{\n";
        size_t i = 0;
        for (auto it = j.begin(); it != j.end(); ++it, ++i) {
            out += pad + json(it.key()).dump() + ": ";
            emit(it.value(), out, indent + 2);
            out += (i + 1 < j.size()) ? ",\n" : "\n";
        }
        out += std::string(size_t(indent), ' ') + "}";
        return;
    }
    case json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            return;
        }
        if (is_flat(j)) {
            emit_inline(j, out);
            return;
        }
        out += "[\n";
        for (size_t i = 0; i < j.size(); ++i) {
            out += pad;
            emit(j[i], out, indent + 2);
            out += (i + 1 < j.size()) ? ",\n" : "\n";
        }
        out += std::string(size_t(indent), ' ') + "]";
        return;
    }
    case json::value_t::number_float: {
        double v = j.get<double>();
        if (!std::isfinite(v)) {
            out += "null";
            return;
        }
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out += buf;
        return;
    }
    default:
        out += j.dump();
    }
}

}  // namespace

std::string dump(const json& j) {
    std::string out;
    emit(j, out, 0);
    out += '\n';
    return out;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

std::uint64_t fnv64(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

json checks_json(const std::vector<measure::Check>& items) {
    json out = json::array();
    for (const auto& c : items)
        out.push_back({{"name", c.name}, {"defect", c.defect}, {"pass", c.pass}, {"applicable", c.applicable}});
    return out;
}

int failed_checks(const std::vector<measure::Check>& items) {
    int n = 0;
    for (const auto& c : items)
        if (c.applicable && !c.pass) ++n;
    return n;
}

json observable_json(const Observable& o) {
    json eff = json::array();
    for (const auto& e : o.effects) eff.push_back(to_json(e));
    return {{"outcomes", o.outcomes}, {"effects", eff}};
}

class Context {
public:
    Tolerance tol;
    int sys_dim = 0;
    int app_dim = 0;
    std::optional<std::uint64_t> seed;
    std::string digest;

    json results = json::array();
    json bounds = json::array();
    int certification_failures = 0;

    void define_objects(const json& objects) {
        if (!objects.is_object()) throw InputError("objects: expected an object");
        for (auto it = objects.begin(); it != objects.end(); ++it) define(it.key(), it.value());
    }

    void run_task(size_t index, const json& task);

private:
    std::map<std::string, std::string> kinds_;
    std::map<std::string, Mat> ops_;
    std::map<std::string, Vec> vecs_;
    std::map<std::string, Observable> obs_;
    std::map<std::string, Instrument> insts_;
    std::map<std::string, OperationMap> chans_;
    std::map<std::string, MeasurementScheme> schemes_;
    std::map<std::string, AdditiveQuantity> quants_;

    void claim(const std::string& name, const std::string& kind) {
        if (name.empty()) throw InputError("object names must be non-empty");
        if (!kinds_.emplace(name, kind).second) throw InputError("name '" + name + "' is already defined");
    }

    [[noreturn]] void wrong_kind(const std::string& where, const std::string& name, const std::string& want) const {
        auto it = kinds_.find(name);
        if (it == kinds_.end()) throw InputError(where + ": unknown name '" + name + "'");
        throw InputError(where + ": '" + name + "' is a " + it->second + ", expected " + want);
    }

public:
    void put(const std::string& name, Mat m) { claim(name, "operator"), ops_[name] = std::move(m); }
    void put(const std::string& name, Vec v) { claim(name, "vector"), vecs_[name] = std::move(v); }
    void put(const std::string& name, Observable o) { claim(name, "observable"), obs_[name] = std::move(o); }
    void put(const std::string& name, Instrument i) { claim(name, "instrument"), insts_[name] = std::move(i); }
    void put(const std::string& name, OperationMap c) { claim(name, "channel"), chans_[name] = std::move(c); }
    void put(const std::string& name, MeasurementScheme m) { claim(name, "scheme"), schemes_[name] = std::move(m); }
    void put(const std::string& name, AdditiveQuantity q) { claim(name, "quantity"), quants_[name] = std::move(q); }

    Mat op(const json& v, const std::string& where) const {
        if (v.is_string()) {
            auto it = ops_.find(v.get<std::string>());
            if (it == ops_.end()) wrong_kind(where, v.get<std::string>(), "operator");
            return it->second;
        }
        Mat m = matrix_from_json(v, where);
        if (!opcore::is_square(m)) throw InputError(where + ": operator must be square");
        return m;
    }

    Vec vec(const json& v, const std::string& where) const {
        if (v.is_string()) {
            auto it = vecs_.find(v.get<std::string>());
            if (it == vecs_.end()) wrong_kind(where, v.get<std::string>(), "vector");
            return it->second;
        }
        return vector_from_json(v, where);
    }

    Observable observable(const json& v, const std::string& where) const {
        if (v.is_string()) {
            auto it = obs_.find(v.get<std::string>());
            if (it == obs_.end()) wrong_kind(where, v.get<std::string>(), "observable");
            return it->second;
        }
        return parse_observable(v, where);
    }

    Instrument instrument(const json& v, const std::string& where) const {
        const std::string name = name_of(v, where);
        if (auto it = insts_.find(name); it != insts_.end()) return it->second;
        if (auto it = schemes_.find(name); it != schemes_.end()) return measure::scheme_to_instrument(it->second);
        wrong_kind(where, name, "instrument or scheme");
    }

    OperationMap channel(const json& v, const std::string& where) const {
        if (v.is_object()) return parse_channel(v, where);
        const std::string name = name_of(v, where);
        if (auto it = chans_.find(name); it != chans_.end()) return it->second;
        if (auto it = insts_.find(name); it != insts_.end()) return it->second.total();
        if (auto it = schemes_.find(name); it != schemes_.end())
            return measure::scheme_to_instrument(it->second).total();
        if (auto it = ops_.find(name); it != ops_.end()) {
            if (!opcore::is_unitary(it->second, tol)) throw InputError(where + ": operator '" + name + "' is not unitary");
            return OperationMap::unitary(it->second);
        }
        wrong_kind(where, name, "channel, instrument, scheme or unitary");
    }

    MeasurementScheme scheme(const json& v, const std::string& where) const {
        const std::string name = name_of(v, where);
        auto it = schemes_.find(name);
        if (it == schemes_.end()) wrong_kind(where, name, "scheme");
        return it->second;
    }

    AdditiveQuantity quantity(const json& v, const std::string& where) const {
        const std::string name = name_of(v, where);
        auto it = quants_.find(name);
        if (it == quants_.end()) wrong_kind(where, name, "quantity");
        return it->second;
    }

private:
    static std::string name_of(const json& v, const std::string& where) {
        if (!v.is_string()) throw InputError(where + ": expected an object name");
        return v.get<std::string>();
    }

    Observable parse_observable(const json& o, const std::string& where) const {
        if (!o.is_object() || !o.contains("effects") || !o["effects"].is_array())
            throw InputError(where + ": observable needs an 'effects' array");
        Observable obs;
        const json& eff = o["effects"];
        for (size_t k = 0; k < eff.size(); ++k)
            obs.effects.push_back(op(eff[k], where + ".effects[" + std::to_string(k) + "]"));
        if (obs.effects.empty()) throw InputError(where + ": observable has no effects");
        obs.dim = int(obs.effects.front().rows());
        if (o.contains("outcomes")) {
            obs.outcomes = o["outcomes"].get<std::vector<std::string>>();
            if (obs.outcomes.size() != obs.effects.size())
                throw InputError(where + ": outcomes and effects differ in length");
        } else {
            obs = make_observable(std::move(obs.effects));
        }
        try {
            obs.validate(tol);
        } catch (const InputError& e) {
            throw InputError(where + ": " + e.what());
        }
        return obs;
    }

    std::vector<Mat> kraus_list(const json& k, const std::string& where) const {
        if (!k.is_array() || k.empty()) throw InputError(where + ": expected a non-empty Kraus list");
        std::vector<Mat> out;
        for (size_t i = 0; i < k.size(); ++i) {
            std::string w = where + "[" + std::to_string(i) + "]";
            out.push_back(k[i].is_string() ? op(k[i], w) : matrix_from_json(k[i], w));
            if (out.back().rows() != out.front().rows() || out.back().cols() != out.front().cols())
                throw InputError(w + ": Kraus operators differ in shape");
        }
        return out;
    }

    OperationMap parse_channel(const json& o, const std::string& where) const {
        OperationMap c;
        if (o.contains("unitary")) {
            Mat u = op(o["unitary"], where + ".unitary");
            if (!opcore::is_unitary(u, tol)) throw InputError(where + ".unitary: not unitary");
            c = OperationMap::unitary(u);
        } else if (o.contains("kraus")) {
            c = OperationMap::from_kraus(kraus_list(o["kraus"], where + ".kraus"));
        } else {
            throw InputError(where + ": channel needs 'kraus' or 'unitary'");
        }
        if (!cpmaps::is_channel(c, tol))
            throw InputError(where + ": not trace preserving (defect " + std::to_string(cpmaps::trace_defect(c)) + ")");
        return c;
    }

    random::Rng rng_for(const std::string& name, const std::string& where) const {
        if (!seed) throw InputError(where + ": random objects need a top-level 'seed'");
        return random::make_rng(splitmix(*seed ^ fnv64(name)));
    }

    int int_field(const json& o, const char* key, int fallback, const std::string& where) const {
        if (!o.contains(key)) {
            if (fallback > 0) return fallback;
            throw InputError(where + ": missing '" + key + "'");
        }
        if (!o[key].is_number_integer() || o[key].get<int>() < 1)
            throw InputError(where + "." + key + ": expected a positive integer");
        return o[key].get<int>();
    }

    void define_random(const std::string& name, const json& o, const std::string& where) {
        if (!o.contains("type") || !o["type"].is_string()) throw InputError(where + ": random object needs 'type'");
        const std::string type = o["type"];
        random::Rng rng = rng_for(name, where);
        const int d = int_field(o, "dim", sys_dim, where);
        if (type == "haar-unitary") {
            put(name, random::haar_unitary(rng, d));
        } else if (type == "hermitian") {
            put(name, random::random_hermitian(rng, d));
        } else if (type == "state") {
            put(name, random::random_state(rng, d, o.value("env", 0)));
        } else if (type == "pure") {
            put(name, random::random_pure(rng, d));
        } else if (type == "povm") {
            put(name, random::random_povm(rng, d, int_field(o, "n", 0, where)));
        } else if (type == "sharp-observable") {
            put(name, random::random_sharp_observable(rng, d, int_field(o, "n", 0, where)));
        } else if (type == "channel") {
            put(name, random::random_channel(rng, d, int_field(o, "kraus", 0, where)));
        } else if (type == "unital-channel") {
            put(name, random::random_unital_channel(rng, d, int_field(o, "terms", 0, where)));
        } else if (type == "conservative-unitary") {
            if (!o.contains("n")) throw InputError(where + ": conservative-unitary needs 'n'");
            Mat n = o["n"].is_string() && quants_.count(o["n"].get<std::string>())
                        ? quants_.at(o["n"].get<std::string>()).composite()
                        : op(o["n"], where + ".n");
            put(name, random::conservative_unitary(rng, n, tol));
        } else {
            throw InputError(where + ": unsupported random type '" + type + "'");
        }
    }

    void define(const std::string& name, const json& o) {
        const std::string where = "objects." + name;
        if (!o.is_object() || !o.contains("kind") || !o["kind"].is_string())
            throw InputError(where + ": expected an object with a 'kind'");
        const std::string kind = o["kind"];
        if (kind == "operator") {
            if (!o.contains("matrix")) throw InputError(where + ": operator needs 'matrix'");
            put(name, op(o["matrix"], where + ".matrix"));
        } else if (kind == "vector") {
            if (o.contains("entries")) {
                put(name, vector_from_json(o["entries"], where + ".entries"));
            } else if (o.contains("column_of")) {
                Mat m = op(o["column_of"], where + ".column_of");
                int k = o.value("index", 0);
                if (k < 0 || k >= m.cols()) throw InputError(where + ".index: out of range");
                put(name, Vec(m.col(k)));
            } else {
                throw InputError(where + ": vector needs 'entries' or 'column_of'");
            }
        } else if (kind == "observable") {
            put(name, parse_observable(o, where));
        } else if (kind == "channel") {
            put(name, parse_channel(o, where));
        } else if (kind == "instrument") {
            if (!o.contains("operations") || !o["operations"].is_array())
                throw InputError(where + ": instrument needs 'operations'");
            Instrument inst;
            for (size_t k = 0; k < o["operations"].size(); ++k)
                inst.operations.push_back(OperationMap::from_kraus(
                    kraus_list(o["operations"][k], where + ".operations[" + std::to_string(k) + "]")));
            inst.dim = inst.operations.empty() ? 0 : inst.operations.front().in_dim;
            if (o.contains("outcomes")) {
                inst.outcomes = o["outcomes"].get<std::vector<std::string>>();
            } else {
                for (size_t k = 0; k < inst.operations.size(); ++k) inst.outcomes.push_back(std::to_string(k));
            }
            try {
                inst.validate(tol);
            } catch (const InputError& e) {
                throw InputError(where + ": " + e.what());
            }
            put(name, std::move(inst));
        } else if (kind == "quantity") {
            if (!o.contains("n_sys") || !o.contains("n_app")) throw InputError(where + ": needs 'n_sys' and 'n_app'");
            AdditiveQuantity q{op(o["n_sys"], where + ".n_sys"), op(o["n_app"], where + ".n_app")};
            try {
                q.validate(tol);
            } catch (const InputError& e) {
                throw InputError(where + ": " + e.what());
            }
            put(name, std::move(q));
        } else if (kind == "scheme") {
            for (const char* key : {"xi", "coupling", "pointer"})
                if (!o.contains(key)) throw InputError(where + ": scheme needs '" + std::string(key) + "'");
            MeasurementScheme m;
            m.xi = op(o["xi"], where + ".xi");
            m.coupling = channel(o["coupling"], where + ".coupling");
            m.pointer = observable(o["pointer"], where + ".pointer");
            m.app_dim = int(m.xi.rows());
            m.sys_dim = m.app_dim ? m.coupling.in_dim / m.app_dim : 0;
            try {
                m.validate(tol);
            } catch (const InputError& e) {
                throw InputError(where + ": " + e.what());
            }
            put(name, std::move(m));
        } else if (kind == "random") {
            define_random(name, o, where);
        } else {
            throw InputError(where + ": unknown kind '" + kind + "'");
        }
    }

    void add_bounds(size_t task, const std::vector<BoundReport>& reports) {
        for (const auto& r : reports) {
            json b = {{"task", task},
                      {"bound_id", r.bound_id},
                      {"gate", bounds::gate_name(bounds::gate_of(r.bound_id))},
                      {"outcome", r.outcome},
                      {"lhs", r.lhs},
                      {"rhs", r.rhs},
                      {"slack", r.slack},
                      {"satisfied", r.satisfied},
                      {"hypothesis_violated", r.hypothesis_violated},
                      {"notes", r.notes},
                      {"inputs_digest", digest}};
            bounds.push_back(std::move(b));
        }
    }

    json execute(size_t index, const std::string& op, const json& args, const std::string& where,
                 const std::string& as);
};

bool flag(const json& args, const char* key) { return args.contains(key) && args[key].get<bool>(); }

const json& need(const json& args, const char* key, const std::string& where) {
    if (!args.contains(key)) throw InputError(where + ": missing argument '" + key + "'");
    return args[key];
}

json Context::execute(size_t index, const std::string& op, const json& args, const std::string& where,
                      const std::string& as) {
    auto arg = [&](const char* key) -> const json& { return need(args, key, where); };
    auto at = [&](const char* key) { return where + "." + key; };
    auto require_as = [&]() {
        if (as.empty()) throw InputError(where + ": operation '" + op + "' needs 'as'");
    };
    json out = json::object();

    if (op == "luders_instrument") {
        require_as();
        Instrument inst = measure::luders_instrument(observable(arg("observable"), at("observable")), tol);
        out["outcomes"] = inst.outcomes;
        put(as, std::move(inst));
    } else if (op == "normal_dilation" || op == "instrument_dilation") {
        require_as();
        MeasurementScheme m = op == "normal_dilation"
                                  ? measure::normal_dilation(observable(arg("observable"), at("observable")), tol)
                                  : measure::instrument_dilation(instrument(arg("instrument"), at("instrument")), tol);
        out["app_dim"] = m.app_dim;
        put(as, std::move(m));
    } else if (op == "rank1_collapse") {
        require_as();
        std::vector<Vec> vs;
        if (args.contains("vectors"))
            for (size_t k = 0; k < args["vectors"].size(); ++k)
                vs.push_back(vec(args["vectors"][k], where + ".vectors[" + std::to_string(k) + "]"));
        put(as, measure::rank1_collapse(observable(arg("observable"), at("observable")), vs, tol));
    } else if (op == "scheme_instrument") {
        require_as();
        put(as, measure::scheme_to_instrument(scheme(arg("scheme"), at("scheme"))));
    } else if (op == "measured_observable") {
        require_as();
        Observable e = measure::measured_observable(scheme(arg("scheme"), at("scheme")));
        out.update(observable_json(e));
        put(as, std::move(e));
    } else if (op == "check_conservation") {
        OperationMap c;
        if (args.contains("scheme")) c = scheme(args["scheme"], at("scheme")).coupling;
        else c = channel(arg("channel"), at("channel"));
        Mat n = args.contains("quantity") ? quantity(args["quantity"], at("quantity")).composite() : this->op(arg("n"), at("n"));
        ConservationReport r = conserve::check_conservation(c, n, tol);
        out = {{"average_defect", r.average_defect},
               {"full_defect", r.full_defect},
               {"average_holds", r.average_holds},
               {"full_holds", r.full_holds}};
    } else if (op == "unitary_equivalence") {
        Mat n = args.contains("quantity") ? quantity(args["quantity"], at("quantity")).composite() : this->op(arg("n"), at("n"));
        UnitaryEquivalenceReport r = conserve::check_unitary_equivalence(this->op(arg("unitary"), at("unitary")), n, tol);
        out = {{"commutator_defect", r.commutator_defect},
               {"average_defect", r.average_defect},
               {"full_defect", r.full_defect},
               {"agree", r.agree}};
        if (!r.agree) ++certification_failures;
    } else if (op == "yanase") {
        YanaseReport r = conserve::yanase_conditions(scheme(arg("scheme"), at("scheme")),
                                                     quantity(arg("quantity"), at("quantity")), tol);
        out = {{"yanase_defect", r.yanase_defect},
               {"weak_yanase_defect", r.weak_yanase_defect},
               {"yanase", r.yanase},
               {"weak_yanase", r.weak_yanase},
               {"equivalence_checked", r.equivalence_checked},
               {"equivalence_agrees", r.equivalence_agrees}};
        if (r.equivalence_checked && !r.equivalence_agrees) ++certification_failures;
    } else if (op == "variance" || op == "qfi") {
        Mat n = this->op(arg("n"), at("n")), s = this->op(arg("state"), at("state"));
        out["value"] = op == "qfi" ? conserve::qfi(n, s, tol) : conserve::variance(n, s, tol);
    } else if (op == "fidelity") {
        Mat a = this->op(arg("rho"), at("rho")), b = this->op(arg("sigma"), at("sigma"));
        out = {{"fidelity", opcore::fidelity(a, b, tol)}, {"root_fidelity", opcore::root_fidelity(a, b, tol)}};
    } else if (op == "commutator_norm") {
        out["value"] = op_norm(opcore::commutator(this->op(arg("a"), at("a")), this->op(arg("b"), at("b"))));
    } else if (op == "channel_commutator") {
        add_bounds(index, {cpmaps::commutator_defect_bound(channel(arg("channel"), at("channel")),
                                                          this->op(arg("a"), at("a")), this->op(arg("b"), at("b")), tol)});
    } else if (op == "multiplicability") {
        cpmaps::MultiplicabilityResult r =
            cpmaps::check_multiplicability(channel(arg("channel"), at("channel")), this->op(arg("b"), at("b")), tol);
        out = {{"applicable", r.applicable},
               {"precondition_defect", r.precondition_defect},
               {"holds", r.holds},
               {"witness", r.witness}};
        if (r.applicable && !r.holds) ++certification_failures;
    } else if (op == "disturbance_profile") {
        DisturbanceProfile p = bounds::disturbance_profile(instrument(arg("instrument"), at("instrument")),
                                                           observable(arg("observable"), at("observable")));
        out = {{"norms", p.norms}, {"global", p.global}};
    } else if (op == "error_profile") {
        ErrorProfile p = bounds::error_profile(scheme(arg("scheme"), at("scheme")), observable(arg("target"), at("target")));
        out = {{"norms", p.norms}, {"global", p.global}};
    } else if (op == "disturbance_bounds") {
        std::optional<AdditiveQuantity> q;
        if (args.contains("quantity")) q = quantity(args["quantity"], at("quantity"));
        add_bounds(index, bounds::eval_disturbance_bounds(scheme(arg("scheme"), at("scheme")),
                                                          observable(arg("observable"), at("observable")), q,
                                                          flag(args, "extremal"), tol));
    } else if (op == "measurability_bounds") {
        add_bounds(index, bounds::eval_measurability_bounds(scheme(arg("scheme"), at("scheme")),
                                                            observable(arg("target"), at("target")),
                                                            quantity(arg("quantity"), at("quantity")),
                                                            flag(args, "extremal"), tol));
    } else if (op == "way") {
        std::optional<Observable> target;
        if (args.contains("target")) target = observable(args["target"], at("target"));
        add_bounds(index, bounds::eval_way(scheme(arg("scheme"), at("scheme")), quantity(arg("quantity"), at("quantity")),
                                           target, flag(args, "extremal"), tol));
    } else if (op == "distinguishability") {
        MeasurementScheme m = scheme(arg("scheme"), at("scheme"));
        Vec psi, phi;
        if (args.contains("extremal_outcome")) {
            Observable e = measure::measured_observable(m);
            const std::string label = args["extremal_outcome"];
            auto it = std::find(e.outcomes.begin(), e.outcomes.end(), label);
            if (it == e.outcomes.end()) throw InputError(at("extremal_outcome") + ": unknown outcome '" + label + "'");
            std::tie(psi, phi) = bounds::extremal_pair(e.effects[size_t(it - e.outcomes.begin())]);
        } else {
            psi = vec(arg("psi"), at("psi"));
            phi = vec(arg("phi"), at("phi"));
        }
        add_bounds(index, bounds::eval_distinguishability_bounds(m, quantity(arg("quantity"), at("quantity")), psi,
                                                                 phi, tol));
    } else if (op == "repeatable_commutation") {
        add_bounds(index, bounds::eval_repeatable_commutation(scheme(arg("scheme"), at("scheme")),
                                                              quantity(arg("quantity"), at("quantity")), tol));
    } else if (op == "repeatability") {
        std::optional<MeasurementScheme> m;
        if (args.contains("scheme")) m = scheme(args["scheme"], at("scheme"));
        measure::RepeatabilityReport r =
            measure::repeatability_report(instrument(arg("instrument"), at("instrument")), m, tol);
        out = {{"repeatable", r.repeatable},
               {"first_kind", r.first_kind},
               {"repeatability_defect", r.repeatability_defect},
               {"first_kind_defect", r.first_kind_defect},
               {"sharp", r.sharp},
               {"sharp_equivalence_disagreement", r.sharp_equivalence_disagreement},
               {"items", checks_json(r.items)}};
        certification_failures += failed_checks(r.items) + (r.sharp_equivalence_disagreement ? 1 : 0);
    } else if (op == "fixed_points") {
        OperationMap c = channel(arg("channel"), at("channel"));
        FixedPointAnalysis a = fixpt::analyze_fixed_points(c, tol);
        std::vector<measure::Check> support = fixpt::check_support_projection(a, c, tol);
        std::vector<measure::Check> restriction = fixpt::check_restriction(a, c, tol);
        json basis = json::array();
        for (const auto& b : a.basis) basis.push_back(to_json(b));
        bool projector_ok = a.idempotence_defect <= tol.rank_tol && a.invariance_defect <= tol.rank_tol;
        out = {{"fixed_dim", a.basis.size()},
               {"faithful", a.faithful},
               {"support_rank", a.support_iso.cols()},
               {"restricted_dim", a.restricted_basis.size()},
               {"P", to_json(a.support_p)},
               {"rho0", to_json(a.rho0)},
               {"basis", basis},
               {"certifications",
                {{"idempotence_defect", a.idempotence_defect},
                 {"invariance_defect", a.invariance_defect},
                 {"algebra_certified", a.algebra_certified},
                 {"algebra_defect", a.algebra_defect},
                 {"commutant_checked", a.commutant_checked},
                 {"commutant_agrees", a.commutant_agrees},
                 {"commutant_defect", a.commutant_defect},
                 {"full_algebra_certified", a.full_algebra_certified},
                 {"support", checks_json(support)},
                 {"restriction", checks_json(restriction)}}}};
        certification_failures += failed_checks(support) + failed_checks(restriction) + (projector_ok ? 0 : 1) +
                                  (a.algebra_certified ? 0 : 1) +
                                  (a.commutant_checked && !(a.commutant_agrees && a.full_algebra_certified) ? 1 : 0);
    } else if (op == "structural") {
        fixpt::StructuralReport r = fixpt::structural_necessary_conditions(
            scheme(arg("scheme"), at("scheme")), observable(arg("observable"), at("observable")),
            quantity(arg("quantity"), at("quantity")), tol);
        out = {{"hypothesis_violated", r.hypothesis_violated},
               {"support_rank", r.support_rank},
               {"non_disturbed", r.non_disturbed},
               {"first_kind", r.first_kind},
               {"repeatable", r.repeatable},
               {"items", checks_json(r.items)}};
        if (!r.hypothesis_violated) certification_failures += failed_checks(r.items);
    } else if (op == "norm1_observable") {
        fixpt::NormOneResult r = fixpt::nondisturbed_norm1_observable(
            channel(arg("channel"), at("channel")), observable(arg("observable"), at("observable")), tol);
        out = observable_json(r.g);
        out["sharp"] = r.sharp;
        out["norm_one"] = r.g.is_norm_one(tol);
        out["fixed_defect"] = r.fixed_defect;
        out["distinguishability_defect"] = r.distinguishability_defect;
        out["selection_rule"] = "greedy commuting refinement in declaration order; not unique";
        if (r.fixed_defect > tol.eq_tol || r.distinguishability_defect > tol.eq_tol || !r.g.is_norm_one(tol))
            ++certification_failures;
        if (!as.empty()) put(as, std::move(r.g));
    } else if (op == "post_processing") {
        fixpt::PostProcessing r = fixpt::post_processing_decomposition(instrument(arg("instrument"), at("instrument")), tol);
        json p = json::array();
        for (Eigen::Index i = 0; i < r.p.rows(); ++i) {
            std::vector<double> row;
            for (Eigen::Index j = 0; j < r.p.cols(); ++j) row.push_back(r.p(i, j).real());
            p.push_back(row);
        }
        out = observable_json(r.g);
        out["p"] = p;
        out["reconstruction_defect"] = r.reconstruction_defect;
        out["column_order"] = "lexicographic";
        if (r.reconstruction_defect > tol.eq_tol) ++certification_failures;
        if (!as.empty()) put(as, std::move(r.g));
    } else {
        throw InputError(where + ": unknown operation '" + op + "'");
    }
    return out;
}

void Context::run_task(size_t index, const json& task) {
    const std::string where = "tasks[" + std::to_string(index) + "]";
    if (!task.is_object() || !task.contains("op") || !task["op"].is_string())
        throw InputError(where + ": expected an object with an 'op'");
    const std::string op = task["op"];
    const json args = task.value("args", json::object());
    if (!args.is_object()) throw InputError(where + ".args: expected an object");
    const std::string as = task.value("as", std::string());

    json data;
    try {
        data = execute(index, op, args, where + " (" + op + ")", as);
    } catch (const InputError& e) {
        std::string msg = e.what();
        if (msg.rfind("tasks[", 0) == 0) throw;
        throw InputError(where + " (" + op + "): " + msg);
    }

    json entry = {{"task", index}, {"op", op}};
    if (!as.empty()) entry["as"] = as;
    if (task.contains("expect")) {
        json checks = json::array();
        for (auto it = task["expect"].begin(); it != task["expect"].end(); ++it) {
            if (!data.contains(it.key())) throw InputError(where + ".expect: result has no field '" + it.key() + "'");
            const json& got = data[it.key()];
            const json& want = it.value();
            bool pass;
            if (want.is_number() && got.is_number()) {
                pass = std::abs(got.get<double>() - want.get<double>()) <= tol.eq_tol;
            } else if (want.is_object() && want.contains("value") && got.is_number()) {
                pass = std::abs(got.get<double>() - want["value"].get<double>()) <= want.value("tol", tol.eq_tol);
            } else {
                pass = got == want;
            }
            if (!pass) ++certification_failures;
            checks.push_back({{"field", it.key()}, {"expected", want}, {"actual", got}, {"pass", pass}});
        }
        data["expectations"] = checks;
    }
    entry.update(data);
    results.push_back(std::move(entry));
}

}  // namespace

RunResult run(const json& scenario, const Tolerance& base, std::optional<double> override_eq_tol) {
    RunResult rr;
    json report = {{"schema", kSchema}};
    try {
        if (!scenario.is_object()) throw InputError("scenario: expected a JSON object");
        if (!scenario.contains("schema") || scenario["schema"] != kSchema)
            throw InputError("schema: expected \"schema\": 1");
        if (!scenario.contains("name") || !scenario["name"].is_string()) throw InputError("name: expected a string");
        report["scenario"] = scenario["name"];

        Context ctx;
        ctx.tol = base;
        if (scenario.contains("tolerance")) {
            const json& t = scenario["tolerance"];
            if (!t.is_object()) throw InputError("tolerance: expected an object");
            ctx.tol.eq_tol = t.value("eq_tol", ctx.tol.eq_tol);
            ctx.tol.rank_tol = t.value("rank_tol", ctx.tol.rank_tol);
        }
        if (override_eq_tol) ctx.tol.eq_tol = *override_eq_tol;
        try {
            ctx.tol.validate();
        } catch (const std::exception& e) {
            throw InputError(std::string("tolerance: ") + e.what());
        }
        if (!scenario.contains("system_dim") || !scenario["system_dim"].is_number_integer() ||
            scenario["system_dim"].get<int>() < 1)
            throw InputError("system_dim: expected a positive integer");
        ctx.sys_dim = scenario["system_dim"];
        ctx.app_dim = scenario.value("apparatus_dim", 0);
        if (scenario.contains("seed")) {
            if (!scenario["seed"].is_number_unsigned()) throw InputError("seed: expected a non-negative integer");
            ctx.seed = scenario["seed"].get<std::uint64_t>();
        }
        json tol_json = {{"eq_tol", ctx.tol.eq_tol}, {"rank_tol", ctx.tol.rank_tol}};
        ctx.digest = fnv1a_hex(dump(scenario) + dump(tol_json));
        report["digest"] = ctx.digest;
        report["tolerance"] = tol_json;

        ctx.define_objects(scenario.value("objects", json::object()));
        if (!scenario.contains("tasks") || !scenario["tasks"].is_array()) throw InputError("tasks: expected an array");
        for (size_t i = 0; i < scenario["tasks"].size(); ++i) ctx.run_task(i, scenario["tasks"][i]);

        int satisfied = 0, violated = 0, hv = 0;
        for (const auto& b : ctx.bounds) {
            if (b["hypothesis_violated"].get<bool>()) ++hv;
            else if (b["satisfied"].get<bool>()) ++satisfied;
            else ++violated;
        }
        report["results"] = ctx.results;
        report["bounds"] = ctx.bounds;
        report["summary"] = {{"total", ctx.bounds.size()},
                             {"satisfied", satisfied},
                             {"violated", violated},
                             {"hypothesis_violated", hv},
                             {"certification_failures", ctx.certification_failures}};
        rr.exit_code = (violated == 0 && ctx.certification_failures == 0) ? 0 : 1;
    } catch (const InputError& e) {
        report["error"] = e.what();
        rr.exit_code = 2;
    } catch (const json::exception& e) {
        report["error"] = std::string("schema: ") + e.what();
        rr.exit_code = 2;
    }
    rr.report = std::move(report);
    return rr;
}

std::string to_csv(const json& report) {
    std::ostringstream os;
    os << "scenario,task,bound_id,gate,outcome,lhs,rhs,slack,satisfied,hypothesis_violated\n";
    if (!report.contains("bounds")) return os.str();
    const std::string name = report.value("scenario", std::string());
    auto num = [](double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    for (const auto& b : report["bounds"]) {
        os << name << ',' << b["task"].get<int>() << ',' << b["bound_id"].get<std::string>() << ','
           << b["gate"].get<std::string>() << ",\"" << b["outcome"].get<std::string>() << "\","
           << num(b["lhs"]) << ',' << num(b["rhs"]) << ',' << num(b["slack"]) << ','
           << (b["satisfied"].get<bool>() ? "true" : "false") << ','
           << (b["hypothesis_violated"].get<bool>() ? "true" : "false") << '\n';
    }
    return os.str();
}

}  // namespace waylab::scenario
