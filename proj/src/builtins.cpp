#include "waylab/random.hpp"
#include "waylab/scenario.hpp"
#include "waylab/suite.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace waylab::scenario {

namespace {

class ParamReader {
public:
    ParamReader(std::string builtin, const Params& p) : name_(std::move(builtin)), params_(p) {}

    double real(const std::string& key, double fallback) {
        used_.insert(key);
        auto it = params_.find(key);
        if (it == params_.end()) return fallback;
        try {
            size_t pos = 0;
            double v = std::stod(it->second, &pos);
            if (pos != it->second.size()) throw std::invalid_argument(it->second);
            return v;
        } catch (const std::exception&) {
            throw InputError(name_ + ": parameter '" + key + "' is not a number: " + it->second);
        }
    }

    int integer(const std::string& key, int fallback) {
        double v = real(key, fallback);
        if (v != std::floor(v)) throw InputError(name_ + ": parameter '" + key + "' must be an integer");
        return int(v);
    }

    std::string text(const std::string& key, const std::string& fallback) {
        used_.insert(key);
        auto it = params_.find(key);
        return it == params_.end() ? fallback : it->second;
    }

    std::vector<double> list(const std::string& key, std::vector<double> fallback) {
        used_.insert(key);
        auto it = params_.find(key);
        if (it == params_.end()) return fallback;
        std::vector<double> out;
        std::stringstream ss(it->second);
        std::string item;
        while (std::getline(ss, item, ','))
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                throw InputError(name_ + ": parameter '" + key + "' must be a comma-separated list of numbers");
            }
        return out;
    }

    void finish() const {
        for (const auto& [k, v] : params_)
            if (!used_.count(k)) throw InputError(name_ + ": unknown parameter '" + k + "'");
    }

private:
    std::string name_;
    const Params& params_;
    std::set<std::string> used_;
};

json operator_obj(const Mat& m) { return {{"kind", "operator"}, {"matrix", to_json(m)}}; }

json observable_obj(const Observable& o) {
    json eff = json::array();
    for (const auto& e : o.effects) eff.push_back(to_json(e));
    return {{"kind", "observable"}, {"outcomes", o.outcomes}, {"effects", eff}};
}

json task(const std::string& op, json args, const std::string& as = {}, json expect = nullptr) {
    json t = {{"op", op}, {"args", std::move(args)}};
    if (!as.empty()) t["as"] = as;
    if (!expect.is_null()) t["expect"] = std::move(expect);
    return t;
}

json skeleton(const std::string& name, int sys_dim) {
    return {{"schema", kSchema}, {"name", name}, {"system_dim", sys_dim}, {"objects", json::object()},
            {"tasks", json::array()}};
}

double checked_lambda(ParamReader& p, const std::string& builtin) {
    double lambda = p.real("lambda", 0.5);
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InputError(builtin + ": lambda must lie in [0, 1]");
    return lambda;
}

json qubit_luders(const Params& params) {
    ParamReader p("qubit-luders", params);
    const double lambda = checked_lambda(p, "qubit-luders");
    p.finish();

    json s = skeleton("qubit-luders", 2);
    s["parameters"] = {{"lambda", lambda}};
    s["objects"]["A"] = observable_obj(suite::sharp_qubit());
    s["objects"]["B"] = observable_obj(suite::b_lambda(lambda));
    json& t = s["tasks"];
    t.push_back(task("luders_instrument", {{"observable", "A"}}, "LA"));
    t.push_back(task("luders_instrument", {{"observable", "B"}}, "LB"));
    t.push_back(task("normal_dilation", {{"observable", "A"}}, "MA"));
    t.push_back(task("normal_dilation", {{"observable", "B"}}, "MB"));
    t.push_back(task("disturbance_profile", {{"instrument", "LA"}, {"observable", "B"}}, {},
                     {{"global", {{"value", lambda / 2.0}, {"tol", 1e-10}}}}));
    t.push_back(task("disturbance_profile", {{"instrument", "LB"}, {"observable", "A"}}, {},
                     {{"global", {{"value", (1.0 - std::sqrt(1.0 - lambda * lambda)) / 2.0}, {"tol", 1e-10}}}}));
    t.push_back(task("disturbance_bounds", {{"scheme", "MA"}, {"observable", "B"}}));
    t.push_back(task("disturbance_bounds", {{"scheme", "MB"}, {"observable", "A"}}));
    t.push_back(task("repeatability", {{"instrument", "LA"}, {"scheme", "MA"}}, {}, {{"repeatable", true}}));
    t.push_back(task("repeatability", {{"instrument", "LB"}, {"scheme", "MB"}}, {},
                     {{"first_kind", true}, {"repeatable", lambda == 1.0}}));
    t.push_back(task("fixed_points", {{"channel", "LB"}}));
    if (lambda > 0.0) {
        t.push_back(task("norm1_observable", {{"channel", "LB"}, {"observable", "B"}}, "G", {{"sharp", true}}));
        t.push_back(task("post_processing", {{"instrument", "LB"}}));
    }
    return s;
}

json qutrit_average_vs_full(const Params& params) {
    ParamReader p("qutrit-average-vs-full", params);
    p.finish();
    const Mat n = suite::qutrit_quantity();
    const std::vector<Mat>& kraus = suite::qutrit_channel().kraus;
    json ks = json::array();
    for (const auto& k : kraus) ks.push_back(to_json(k));

    json s = skeleton("qutrit-average-vs-full", 3);
    s["objects"]["N"] = operator_obj(n);
    s["objects"]["C"] = {{"kind", "channel"}, {"kraus", ks}};
    s["tasks"].push_back(task("check_conservation", {{"channel", "C"}, {"n", "N"}}, {},
                              {{"average_holds", true}, {"full_holds", false}, {"full_defect", {{"value", 1.0}, {"tol", 1e-12}}}}));
    s["tasks"].push_back(task("fixed_points", {{"channel", "C"}}));
    return s;
}

json normal_dilation_builtin(const Params& params) {
    ParamReader p("normal-dilation", params);
    const std::string kind = p.text("observable", "b-lambda");
    const double lambda = checked_lambda(p, "normal-dilation");
    const int seed = p.integer("seed", 1);
    const int dim = p.integer("dim", 3);
    const int n = p.integer("n", 2);
    p.finish();

    Observable e;
    random::Rng rng = random::make_rng(std::uint64_t(seed));
    if (kind == "b-lambda") e = suite::b_lambda(lambda);
    else if (kind == "sharp") e = random::random_sharp_observable(rng, dim, n);
    else if (kind == "povm") e = random::random_povm(rng, dim, n);
    else throw InputError("normal-dilation: observable must be b-lambda, sharp or povm");

    json s = skeleton("normal-dilation", e.dim);
    s["parameters"] = {{"observable", kind}, {"lambda", lambda}, {"seed", seed}, {"dim", dim}, {"n", n}};
    s["objects"]["E"] = observable_obj(e);
    json& t = s["tasks"];
    t.push_back(task("normal_dilation", {{"observable", "E"}}, "M"));
    t.push_back(task("error_profile", {{"scheme", "M"}, {"target", "E"}}, {}, {{"global", 0.0}}));
    t.push_back(task("repeatability", {{"instrument", "M"}, {"scheme", "M"}}, {}, {{"first_kind", e.is_commutative()}}));
    t.push_back(task("fixed_points", {{"channel", "M"}}));
    return s;
}

Mat spectrum_operator(random::Rng& rng, const std::vector<double>& spec, bool rotate) {
    const int d = int(spec.size());
    Mat diag = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) diag(i, i) = spec[size_t(i)];
    if (!rotate) return diag;
    Mat u = random::haar_unitary(rng, d);
    return opcore::hermitian_part(u * diag * u.adjoint());
}

json conservative_scheme(const Params& params) {
    ParamReader p("conservative-scheme", params);
    const int seed = p.integer("seed", 7);
    const int ds = p.integer("dS", 2);
    const int da = p.integer("dA", 3);
    std::vector<double> def_s, def_a;
    for (int i = 0; i < ds; ++i) def_s.push_back(i);
    for (int i = 0; i < da; ++i) def_a.push_back(i);
    const std::vector<double> ns_spec = p.list("nsys", def_s);
    const std::vector<double> na_spec = p.list("napp", def_a);
    const std::string pointer = p.text("pointer", "yanase");
    p.finish();
    if (int(ns_spec.size()) != ds || int(na_spec.size()) != da)
        throw InputError("conservative-scheme: spectra must have dS and dA entries");
    if (pointer != "yanase" && pointer != "random")
        throw InputError("conservative-scheme: pointer must be yanase or random");

    random::Rng rng = random::make_rng(std::uint64_t(seed));
    const Mat ns = spectrum_operator(rng, ns_spec, true);
    const Mat na = spectrum_operator(rng, na_spec, false);
    AdditiveQuantity q{ns, na};
    const Mat u = random::conservative_unitary(rng, q.composite());
    const Mat xi = random::random_state(rng, da);

    Observable z;
    if (pointer == "yanase") {
        std::uniform_real_distribution<double> w(0.0, 1.0);
        Mat z0 = Mat::Zero(da, da);
        for (int i = 0; i < da; ++i) z0(i, i) = w(rng);
        z = make_observable({z0, opcore::identity(da) - z0});
    } else {
        z = random::random_povm(rng, da, 2);
    }
    const Observable f = random::random_povm(rng, ds, 2);
    const Observable target = random::random_sharp_observable(rng, ds, 2);
    const Mat basis = random::haar_unitary(rng, ds);

    json s = skeleton("conservative-scheme", ds);
    s["apparatus_dim"] = da;
    s["parameters"] = {{"seed", seed}, {"dS", ds}, {"dA", da}, {"nsys", ns_spec}, {"napp", na_spec}, {"pointer", pointer}};
    json& o = s["objects"];
    o["NS"] = operator_obj(ns);
    o["NA"] = operator_obj(na);
    o["q"] = {{"kind", "quantity"}, {"n_sys", "NS"}, {"n_app", "NA"}};
    o["U"] = operator_obj(u);
    o["xi"] = operator_obj(xi);
    o["Z"] = observable_obj(z);
    o["M"] = {{"kind", "scheme"}, {"xi", "xi"}, {"coupling", "U"}, {"pointer", "Z"}};
    o["F"] = observable_obj(f);
    o["T"] = observable_obj(target);
    o["psi"] = {{"kind", "vector"}, {"entries", to_json(Vec(basis.col(0)))}};
    o["phi"] = {{"kind", "vector"}, {"entries", to_json(Vec(basis.col(1)))}};
    json& t = s["tasks"];
    t.push_back(task("check_conservation", {{"scheme", "M"}, {"quantity", "q"}}, {},
                     {{"average_holds", true}, {"full_holds", true}}));
    t.push_back(task("unitary_equivalence", {{"unitary", "U"}, {"quantity", "q"}}, {}, {{"agree", true}}));
    t.push_back(task("yanase", {{"scheme", "M"}, {"quantity", "q"}}));
    t.push_back(task("disturbance_bounds", {{"scheme", "M"}, {"observable", "F"}, {"quantity", "q"}}));
    t.push_back(task("measurability_bounds", {{"scheme", "M"}, {"target", "T"}, {"quantity", "q"}}));
    t.push_back(task("way", {{"scheme", "M"}, {"quantity", "q"}}));
    t.push_back(task("distinguishability", {{"scheme", "M"}, {"quantity", "q"}, {"psi", "psi"}, {"phi", "phi"}}));
    t.push_back(task("distinguishability", {{"scheme", "M"}, {"quantity", "q"}, {"extremal_outcome", "0"}}));
    t.push_back(task("repeatability", {{"instrument", "M"}, {"scheme", "M"}}));
    t.push_back(task("structural", {{"scheme", "M"}, {"observable", "F"}, {"quantity", "q"}}));
    return s;
}

json rank1_collapse_builtin(const Params& params) {
    ParamReader p("rank1-collapse", params);
    const int seed = p.integer("seed", 3);
    const int dim = p.integer("dim", 3);
    const int n = p.integer("n", 3);
    p.finish();

    random::Rng rng = random::make_rng(std::uint64_t(seed));
    const Observable e = random::random_sharp_observable(rng, dim, n);
    Mat ns = Mat::Zero(dim, dim);
    for (size_t x = 0; x < e.size(); ++x) ns += double(x) * e.effects[x];

    json s = skeleton("rank1-collapse", dim);
    s["parameters"] = {{"seed", seed}, {"dim", dim}, {"n", n}};
    json& o = s["objects"];
    o["E"] = observable_obj(e);
    o["NS"] = operator_obj(ns);
    json& t = s["tasks"];
    t.push_back(task("rank1_collapse", {{"observable", "E"}}, "I"));
    t.push_back(task("instrument_dilation", {{"instrument", "I"}}, "M"));
    t.push_back(task("repeatability", {{"instrument", "I"}, {"scheme", "M"}}, {}, {{"repeatable", true}}));
    t.push_back(task("fixed_points", {{"channel", "I"}}));
    t.push_back(task("post_processing", {{"instrument", "I"}}));
    return s;
}

}  // namespace

std::vector<std::string> builtin_names() {
    return {"qubit-luders", "qutrit-average-vs-full", "normal-dilation", "conservative-scheme", "rank1-collapse"};
}

json builtin(const std::string& name, const Params& params) {
    if (name == "qubit-luders") return qubit_luders(params);
    if (name == "qutrit-average-vs-full") return qutrit_average_vs_full(params);
    if (name == "normal-dilation") return normal_dilation_builtin(params);
    if (name == "conservative-scheme") return conservative_scheme(params);
    if (name == "rank1-collapse") return rank1_collapse_builtin(params);
    throw InputError("unknown builtin '" + name + "'");
}

}  // namespace waylab::scenario
