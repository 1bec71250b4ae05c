// Scenario files: strict JSON configs for batch experiments, a dispatcher
// that runs them against the library, and deterministic report/CSV output.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qakit/comb.hpp"
#include "qakit/qa.hpp"

namespace qakit::scenario {

using nlohmann::json;
using gfun::CoefficientFn;
using gfun::StructuredUD;
using gfun::TestFunction;
using gfun::Window;
using svf::Locus;
using svf::SlowlyVaryingFn;

enum class Kind { CombVerify, WeightsVerify, QuasiLimit, NegIntExpansion, Extension, ZLocality };

inline const char* kind_name(Kind k) {
    switch (k) {
        case Kind::CombVerify: return "CombVerify";
        case Kind::WeightsVerify: return "WeightsVerify";
        case Kind::QuasiLimit: return "QuasiLimit";
        case Kind::NegIntExpansion: return "NegIntExpansion";
        case Kind::Extension: return "Extension";
        case Kind::ZLocality: return "ZLocality";
    }
    throw std::logic_error("kind_name: unreachable");
}

class ScenarioError : public std::runtime_error {
  public:
    ScenarioError(std::string summary, std::vector<std::string> problems)
        : std::runtime_error(join(summary, problems)), problems_(std::move(problems)) {}
    const std::vector<std::string>& problems() const { return problems_; }

  private:
    static std::string join(const std::string& summary, const std::vector<std::string>& problems) {
        std::string out = summary;
        for (const auto& p : problems) {
            out += "\n  ";
            out += p;
        }
        return out;
    }
    std::vector<std::string> problems_;
};

struct FnSpec {
    enum class Type { PowerLaw, BumpLike, Poly, LogSingular };
    Type type = Type::PowerLaw;
    // power_law
    double c_plus = 0.0, c_minus = 0.0;
    int parity = 0;
    double exponent = 0.0, cutoff = 1.0;
    Window window = Window::None;
    // bump_like
    double center = 0.0, radius = 1.0, scale = 1.0;
    // poly
    std::vector<double> coeffs;
    // log_singular
    double a2 = 0.0, a1_plus = 0.0, a1_minus = 0.0, a0_plus = 0.0, a0_minus = 0.0;
    double inner = 1.0, outer = 2.0;
};

struct TermSpec {
    unsigned order = 0;
    FnSpec fn;
};

struct TestFunctionSpec {
    enum class Type { Bump, PolyBump, Gaussian, Plateau };
    Type type = Type::Bump;
    double center = 0.0, radius = 1.0, scale = 1.0, inner = 1.0, outer = 2.0;
    std::vector<double> coeffs;
    std::optional<unsigned> max_order;
};

struct Tolerances {
    double rel_limit = 1e-3;
    double residual = 1e-3;
    double quadrature = 1e-10;
    double tail = 1e-12;
};

struct StructureSection {
    std::vector<qa::CoefficientRow> rows;
    std::optional<double> c_star, c_star1, c_star2;
};

struct NegIntSection {
    double c0_plus = 0.0;
    double c0_minus = 0.0;
};

struct ExtensionSection {
    qa::ExtensionKind kind = qa::ExtensionKind::NonIntegerPositive;
    unsigned big_n = 0;
    unsigned k = 1;
    double c = 1.0;
    std::vector<double> a;
    std::vector<double> atoms;
};

struct WeightsSection {
    std::vector<double> ell;
    unsigned p_max = 50;
};

struct ZSection {
    unsigned n_cap = 3;
};

struct Scenario {
    std::string name;
    Kind kind = Kind::CombVerify;
    Locus locus = Locus::Infinity;
    double gevrey_s = 2.0;
    std::string L = "1";
    double alpha = 0.0;
    std::vector<TermSpec> terms;
    std::vector<TestFunctionSpec> test_functions;
    qa::Ladder ladder{100.0, 10.0, 5};
    qa::Method method = qa::Method::PlainLast;
    Tolerances tol;
    unsigned comb_m_max = 12;
    std::optional<WeightsSection> weights;
    std::optional<StructureSection> structure;
    std::optional<NegIntSection> negint;
    std::optional<ExtensionSection> extension;
    std::optional<ZSection> zlocality;
};

// ---------------------------------------------------------------------------
// Strict parsing: every problem is collected with its JSON-pointer path.
// ---------------------------------------------------------------------------
namespace detail {

struct Errors {
    std::vector<std::string> list;
    void add(const std::string& path, const std::string& msg) { list.push_back(path + ": " + msg); }
    bool ok() const { return list.empty(); }
};

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> allowed, Errors& errs) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) {
                known = true;
                break;
            }
        if (!known) errs.add(path + "/" + item.key(), "unknown key");
    }
}

inline const json* get_field(const json& obj, const std::string& path, const char* key,
                             bool required, Errors& errs) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        if (required) errs.add(path + "/" + key, "missing required field");
        return nullptr;
    }
    return &*it;
}

inline std::optional<double> get_number(const json& obj, const std::string& path, const char* key,
                                        bool required, Errors& errs) {
    const json* v = get_field(obj, path, key, required, errs);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
        errs.add(path + "/" + key, "expected a number");
        return std::nullopt;
    }
    return v->get<double>();
}

inline std::optional<unsigned> get_uint(const json& obj, const std::string& path, const char* key,
                                        bool required, Errors& errs) {
    const json* v = get_field(obj, path, key, required, errs);
    if (!v) return std::nullopt;
    if (!v->is_number_unsigned()) {
        errs.add(path + "/" + key, "expected a non-negative integer");
        return std::nullopt;
    }
    return v->get<unsigned>();
}

inline std::optional<std::string> get_string(const json& obj, const std::string& path,
                                             const char* key, bool required, Errors& errs) {
    const json* v = get_field(obj, path, key, required, errs);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
        errs.add(path + "/" + key, "expected a string");
        return std::nullopt;
    }
    return v->get<std::string>();
}

inline std::optional<std::vector<double>> get_number_array(const json& obj, const std::string& path,
                                                           const char* key, bool required,
                                                           Errors& errs) {
    const json* v = get_field(obj, path, key, required, errs);
    if (!v) return std::nullopt;
    if (!v->is_array()) {
        errs.add(path + "/" + key, "expected an array of numbers");
        return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_number()) {
            errs.add(path + "/" + key + "/" + std::to_string(i), "expected a number");
            return std::nullopt;
        }
        out.push_back((*v)[i].get<double>());
    }
    return out;
}

inline std::optional<Kind> kind_from_name(const std::string& s) {
    for (Kind k : {Kind::CombVerify, Kind::WeightsVerify, Kind::QuasiLimit, Kind::NegIntExpansion,
                   Kind::Extension, Kind::ZLocality})
        if (s == kind_name(k)) return k;
    return std::nullopt;
}

inline FnSpec parse_fn(const json& obj, const std::string& path, Errors& errs) {
    FnSpec fn;
    if (!obj.is_object()) {
        errs.add(path, "expected an object");
        return fn;
    }
    const auto type = get_string(obj, path, "type", true, errs);
    if (!type) return fn;
    if (*type == "power_law") {
        fn.type = FnSpec::Type::PowerLaw;
        check_keys(obj, path, {"type", "c_plus", "c_minus", "parity", "exponent", "cutoff", "window"},
                   errs);
        fn.c_plus = get_number(obj, path, "c_plus", true, errs).value_or(0.0);
        fn.c_minus = get_number(obj, path, "c_minus", true, errs).value_or(0.0);
        if (auto p = get_uint(obj, path, "parity", false, errs)) fn.parity = static_cast<int>(*p);
        fn.exponent = get_number(obj, path, "exponent", true, errs).value_or(0.0);
        fn.cutoff = get_number(obj, path, "cutoff", true, errs).value_or(1.0);
        const auto w = get_string(obj, path, "window", true, errs);
        if (w) {
            if (*w == "None") fn.window = Window::None;
            else if (*w == "Sharp") fn.window = Window::Sharp;
            else if (*w == "Smooth") fn.window = Window::Smooth;
            else errs.add(path + "/window", "unknown window '" + *w + "'");
        }
    } else if (*type == "bump_like") {
        fn.type = FnSpec::Type::BumpLike;
        check_keys(obj, path, {"type", "center", "radius", "scale"}, errs);
        fn.center = get_number(obj, path, "center", true, errs).value_or(0.0);
        fn.radius = get_number(obj, path, "radius", true, errs).value_or(1.0);
        if (auto v = get_number(obj, path, "scale", false, errs)) fn.scale = *v;
    } else if (*type == "poly") {
        fn.type = FnSpec::Type::Poly;
        check_keys(obj, path, {"type", "coeffs"}, errs);
        fn.coeffs = get_number_array(obj, path, "coeffs", true, errs).value_or(std::vector<double>{});
    } else if (*type == "log_singular") {
        fn.type = FnSpec::Type::LogSingular;
        check_keys(obj, path,
                   {"type", "a2", "a1_plus", "a1_minus", "a0_plus", "a0_minus", "inner", "outer"},
                   errs);
        fn.a2 = get_number(obj, path, "a2", true, errs).value_or(0.0);
        fn.a1_plus = get_number(obj, path, "a1_plus", true, errs).value_or(0.0);
        fn.a1_minus = get_number(obj, path, "a1_minus", true, errs).value_or(0.0);
        fn.a0_plus = get_number(obj, path, "a0_plus", true, errs).value_or(0.0);
        fn.a0_minus = get_number(obj, path, "a0_minus", true, errs).value_or(0.0);
        fn.inner = get_number(obj, path, "inner", true, errs).value_or(1.0);
        fn.outer = get_number(obj, path, "outer", true, errs).value_or(2.0);
    } else {
        errs.add(path + "/type", "unknown coefficient function '" + *type + "'");
    }
    return fn;
}

inline TestFunctionSpec parse_tf(const json& obj, const std::string& path, Errors& errs) {
    TestFunctionSpec tf;
    if (!obj.is_object()) {
        errs.add(path, "expected an object");
        return tf;
    }
    const auto type = get_string(obj, path, "type", true, errs);
    if (!type) return tf;
    if (*type == "bump") {
        tf.type = TestFunctionSpec::Type::Bump;
        check_keys(obj, path, {"type", "center", "radius", "max_order"}, errs);
        tf.center = get_number(obj, path, "center", true, errs).value_or(0.0);
        tf.radius = get_number(obj, path, "radius", true, errs).value_or(1.0);
    } else if (*type == "poly_bump") {
        tf.type = TestFunctionSpec::Type::PolyBump;
        check_keys(obj, path, {"type", "center", "radius", "coeffs", "max_order"}, errs);
        tf.center = get_number(obj, path, "center", true, errs).value_or(0.0);
        tf.radius = get_number(obj, path, "radius", true, errs).value_or(1.0);
        tf.coeffs = get_number_array(obj, path, "coeffs", true, errs).value_or(std::vector<double>{});
    } else if (*type == "gaussian") {
        tf.type = TestFunctionSpec::Type::Gaussian;
        check_keys(obj, path, {"type", "scale"}, errs);
        tf.scale = get_number(obj, path, "scale", true, errs).value_or(1.0);
    } else if (*type == "plateau") {
        tf.type = TestFunctionSpec::Type::Plateau;
        check_keys(obj, path, {"type", "inner", "outer", "max_order"}, errs);
        tf.inner = get_number(obj, path, "inner", true, errs).value_or(1.0);
        tf.outer = get_number(obj, path, "outer", true, errs).value_or(2.0);
    } else {
        errs.add(path + "/type", "unknown test function '" + *type + "'");
        return tf;
    }
    if (auto mo = get_uint(obj, path, "max_order", false, errs)) tf.max_order = *mo;
    return tf;
}

inline bool safe_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
            return false;
    return true;
}

}  // namespace detail

inline Scenario parse_scenario_json(const json& root, const std::string& origin) {
    detail::Errors errs;
    Scenario s;
    if (!root.is_object()) {
        errs.add("", "top level must be a JSON object");
        throw ScenarioError("invalid scenario (" + origin + ")", errs.list);
    }
    detail::check_keys(root, "",
                       {"name", "kind", "locus", "weight", "L", "alpha", "terms", "test_functions",
                        "ladder", "method", "tolerances", "comb", "weights", "structure", "negint",
                        "extension", "zlocality"},
                       errs);

    if (auto name = detail::get_string(root, "", "name", true, errs)) {
        s.name = *name;
        if (!detail::safe_name(s.name))
            errs.add("/name", "must be nonempty and use only [A-Za-z0-9._-]");
    }
    if (auto kind = detail::get_string(root, "", "kind", true, errs)) {
        if (auto k = detail::kind_from_name(*kind)) s.kind = *k;
        else errs.add("/kind", "unknown kind '" + *kind + "'");
    }
    if (auto locus = detail::get_string(root, "", "locus", false, errs)) {
        if (*locus == "Infinity") s.locus = Locus::Infinity;
        else if (*locus == "Origin") s.locus = Locus::Origin;
        else errs.add("/locus", "expected 'Infinity' or 'Origin'");
    }
    if (const json* w = detail::get_field(root, "", "weight", false, errs)) {
        if (!w->is_object()) {
            errs.add("/weight", "expected an object");
        } else {
            detail::check_keys(*w, "/weight", {"gevrey_s"}, errs);
            if (auto v = detail::get_number(*w, "/weight", "gevrey_s", true, errs)) {
                s.gevrey_s = *v;
                if (!(*v > 1.0)) errs.add("/weight/gevrey_s", "Gevrey order must exceed 1");
            }
        }
    }
    bool has_alpha = false;
    if (auto v = detail::get_number(root, "", "alpha", false, errs)) {
        s.alpha = *v;
        has_alpha = true;
    }
    if (auto v = detail::get_string(root, "", "L", false, errs)) s.L = *v;
    if (const json* t = detail::get_field(root, "", "terms", false, errs)) {
        if (!t->is_array()) {
            errs.add("/terms", "expected an array");
        } else {
            for (std::size_t i = 0; i < t->size(); ++i) {
                const std::string path = "/terms/" + std::to_string(i);
                const json& term = (*t)[i];
                if (!term.is_object()) {
                    errs.add(path, "expected an object");
                    continue;
                }
                detail::check_keys(term, path, {"order", "fn"}, errs);
                TermSpec spec;
                spec.order = detail::get_uint(term, path, "order", true, errs).value_or(0);
                if (const json* fn = detail::get_field(term, path, "fn", true, errs))
                    spec.fn = detail::parse_fn(*fn, path + "/fn", errs);
                s.terms.push_back(std::move(spec));
            }
        }
    }
    if (const json* t = detail::get_field(root, "", "test_functions", false, errs)) {
        if (!t->is_array()) errs.add("/test_functions", "expected an array");
        else
            for (std::size_t i = 0; i < t->size(); ++i)
                s.test_functions.push_back(
                    detail::parse_tf((*t)[i], "/test_functions/" + std::to_string(i), errs));
    }
    bool has_ladder = false;
    if (const json* l = detail::get_field(root, "", "ladder", false, errs)) {
        if (!l->is_object()) {
            errs.add("/ladder", "expected an object");
        } else {
            has_ladder = true;
            detail::check_keys(*l, "/ladder", {"base", "ratio", "count"}, errs);
            s.ladder.base = detail::get_number(*l, "/ladder", "base", true, errs).value_or(100.0);
            s.ladder.ratio = detail::get_number(*l, "/ladder", "ratio", true, errs).value_or(10.0);
            s.ladder.count = detail::get_uint(*l, "/ladder", "count", true, errs).value_or(5);
        }
    }
    if (auto m = detail::get_string(root, "", "method", false, errs)) {
        try {
            s.method = qa::method_from_name(*m);
        } catch (const std::invalid_argument& e) {
            errs.add("/method", e.what());
        }
    }
    if (const json* t = detail::get_field(root, "", "tolerances", false, errs)) {
        if (!t->is_object()) {
            errs.add("/tolerances", "expected an object");
        } else {
            detail::check_keys(*t, "/tolerances", {"rel_limit", "residual", "quadrature", "tail"},
                               errs);
            if (auto v = detail::get_number(*t, "/tolerances", "rel_limit", false, errs))
                s.tol.rel_limit = *v;
            if (auto v = detail::get_number(*t, "/tolerances", "residual", false, errs))
                s.tol.residual = *v;
            if (auto v = detail::get_number(*t, "/tolerances", "quadrature", false, errs))
                s.tol.quadrature = *v;
            if (auto v = detail::get_number(*t, "/tolerances", "tail", false, errs)) s.tol.tail = *v;
        }
    }
    if (const json* c = detail::get_field(root, "", "comb", false, errs)) {
        if (!c->is_object()) {
            errs.add("/comb", "expected an object");
        } else {
            detail::check_keys(*c, "/comb", {"m_max"}, errs);
            if (auto v = detail::get_uint(*c, "/comb", "m_max", false, errs)) s.comb_m_max = *v;
        }
    }
    if (const json* w = detail::get_field(root, "", "weights", false, errs)) {
        if (!w->is_object()) {
            errs.add("/weights", "expected an object");
        } else {
            detail::check_keys(*w, "/weights", {"ell", "p_max"}, errs);
            WeightsSection ws;
            ws.ell = detail::get_number_array(*w, "/weights", "ell", true, errs)
                         .value_or(std::vector<double>{});
            ws.p_max = detail::get_uint(*w, "/weights", "p_max", true, errs).value_or(50);
            s.weights = std::move(ws);
        }
    }
    if (const json* st = detail::get_field(root, "", "structure", false, errs)) {
        if (!st->is_object()) {
            errs.add("/structure", "expected an object");
        } else {
            detail::check_keys(*st, "/structure", {"rows", "c_star", "c_star1", "c_star2"}, errs);
            StructureSection sec;
            if (const json* rows = detail::get_field(*st, "/structure", "rows", true, errs)) {
                if (!rows->is_array()) {
                    errs.add("/structure/rows", "expected an array");
                } else {
                    for (std::size_t i = 0; i < rows->size(); ++i) {
                        const std::string path = "/structure/rows/" + std::to_string(i);
                        const json& row = (*rows)[i];
                        if (!row.is_object()) {
                            errs.add(path, "expected an object");
                            continue;
                        }
                        detail::check_keys(row, path, {"m", "c_plus", "c_minus"}, errs);
                        qa::CoefficientRow r;
                        r.m = detail::get_uint(row, path, "m", true, errs).value_or(0);
                        r.c_plus = detail::get_number(row, path, "c_plus", true, errs).value_or(0.0);
                        r.c_minus =
                            detail::get_number(row, path, "c_minus", true, errs).value_or(0.0);
                        sec.rows.push_back(r);
                    }
                }
            }
            sec.c_star = detail::get_number(*st, "/structure", "c_star", false, errs);
            sec.c_star1 = detail::get_number(*st, "/structure", "c_star1", false, errs);
            sec.c_star2 = detail::get_number(*st, "/structure", "c_star2", false, errs);
            s.structure = std::move(sec);
        }
    }
    if (const json* n = detail::get_field(root, "", "negint", false, errs)) {
        if (!n->is_object()) {
            errs.add("/negint", "expected an object");
        } else {
            detail::check_keys(*n, "/negint", {"c0_plus", "c0_minus"}, errs);
            NegIntSection sec;
            sec.c0_plus = detail::get_number(*n, "/negint", "c0_plus", true, errs).value_or(0.0);
            sec.c0_minus = detail::get_number(*n, "/negint", "c0_minus", true, errs).value_or(0.0);
            s.negint = sec;
        }
    }
    if (const json* e = detail::get_field(root, "", "extension", false, errs)) {
        if (!e->is_object()) {
            errs.add("/extension", "expected an object");
        } else {
            detail::check_keys(*e, "/extension", {"kind", "big_n", "k", "c", "a", "atoms"}, errs);
            ExtensionSection sec;
            if (auto kind = detail::get_string(*e, "/extension", "kind", true, errs)) {
                if (*kind == "NonIntegerPositive") sec.kind = qa::ExtensionKind::NonIntegerPositive;
                else if (*kind == "NonIntegerNegative")
                    sec.kind = qa::ExtensionKind::NonIntegerNegative;
                else if (*kind == "NegIntOrder") sec.kind = qa::ExtensionKind::NegIntOrder;
                else errs.add("/extension/kind", "unknown extension kind '" + *kind + "'");
            }
            if (auto v = detail::get_uint(*e, "/extension", "big_n", false, errs)) sec.big_n = *v;
            if (auto v = detail::get_uint(*e, "/extension", "k", false, errs)) sec.k = *v;
            sec.c = detail::get_number(*e, "/extension", "c", true, errs).value_or(1.0);
            if (auto v = detail::get_number_array(*e, "/extension", "a", false, errs)) sec.a = *v;
            if (auto v = detail::get_number_array(*e, "/extension", "atoms", false, errs))
                sec.atoms = *v;
            s.extension = std::move(sec);
        }
    }
    if (const json* z = detail::get_field(root, "", "zlocality", false, errs)) {
        if (!z->is_object()) {
            errs.add("/zlocality", "expected an object");
        } else {
            detail::check_keys(*z, "/zlocality", {"n_cap"}, errs);
            ZSection sec;
            sec.n_cap = detail::get_uint(*z, "/zlocality", "n_cap", true, errs).value_or(3);
            s.zlocality = sec;
        }
    }

    // Kind-specific requirements and cross-field validation.
    const bool uses_ladder = s.kind == Kind::QuasiLimit || s.kind == Kind::NegIntExpansion ||
                             s.kind == Kind::Extension || s.kind == Kind::ZLocality;
    const bool uses_terms = uses_ladder;
    if (uses_terms && s.terms.empty()) errs.add("/terms", "required for kind " + std::string(kind_name(s.kind)));
    if (uses_ladder && s.test_functions.empty())
        errs.add("/test_functions", "required for kind " + std::string(kind_name(s.kind)));
    if (uses_ladder && !has_ladder) errs.add("/ladder", "required for kind " + std::string(kind_name(s.kind)));
    if (uses_ladder && has_ladder) {
        const Locus ladder_locus = s.kind == Kind::ZLocality ? Locus::Origin : s.locus;
        try {
            qa::make_scales(s.ladder, ladder_locus);
        } catch (const std::invalid_argument& e) {
            errs.add("/ladder", e.what());
        }
    }
    if (s.kind != Kind::CombVerify && s.kind != Kind::WeightsVerify) {
        try {
            SlowlyVaryingFn::parse(s.L, s.locus);
        } catch (const std::invalid_argument& e) {
            errs.add("/L", e.what());
        }
    }
    switch (s.kind) {
        case Kind::CombVerify:
        case Kind::WeightsVerify:
            if (s.kind == Kind::WeightsVerify) {
                if (!s.weights) errs.add("/weights", "required for kind WeightsVerify");
                else if (s.weights->ell.empty())
                    errs.add("/weights/ell", "need at least one ell value");
            }
            break;
        case Kind::QuasiLimit: {
            if (!has_alpha) errs.add("/alpha", "required for kind QuasiLimit");
            if (!s.structure) {
                errs.add("/structure", "required for kind QuasiLimit");
            } else if (has_alpha) {
                try {
                    const double a = s.alpha;
                    if (a < 0.0 && a == std::rint(a)) {
                        const unsigned k = static_cast<unsigned>(-a);
                        if (s.locus == Locus::Origin)
                            qa::StructuralData::origin_negint(k, s.structure->rows,
                                                              s.structure->c_star1.value_or(0.0),
                                                              s.structure->c_star2.value_or(0.0));
                        else
                            qa::StructuralData::negint(k, s.structure->rows,
                                                       s.structure->c_star.value_or(0.0));
                    } else {
                        qa::StructuralData::noninteger(a, s.structure->rows);
                    }
                } catch (const std::invalid_argument& e) {
                    errs.add("/structure", e.what());
                }
            }
            break;
        }
        case Kind::NegIntExpansion:
            if (!s.negint) errs.add("/negint", "required for kind NegIntExpansion");
            if (s.terms.size() != 1 || (!s.terms.empty() && s.terms.front().order != 0))
                errs.add("/terms", "NegIntExpansion takes exactly one order-0 term");
            if (s.locus != Locus::Infinity) errs.add("/locus", "NegIntExpansion lives at infinity");
            break;
        case Kind::Extension:
            if (!s.extension) {
                errs.add("/extension", "required for kind Extension");
            } else {
                const auto& e = *s.extension;
                if (e.kind == qa::ExtensionKind::NonIntegerPositive && !has_alpha)
                    errs.add("/alpha", "required for noninteger extension kinds");
                if (e.kind == qa::ExtensionKind::NonIntegerNegative) {
                    if (!has_alpha) errs.add("/alpha", "required for noninteger extension kinds");
                    if (e.a.size() != e.big_n)
                        errs.add("/extension/a", "need exactly big_n correction constants");
                }
                if (e.kind == qa::ExtensionKind::NegIntOrder) {
                    if (e.k != 1) errs.add("/extension/k", "only k = 1 is computed");
                    if (e.a.size() != e.k)
                        errs.add("/extension/a", "need exactly k correction constants");
                }
            }
            if (s.locus != Locus::Infinity) errs.add("/locus", "Extension lives at infinity");
            break;
        case Kind::ZLocality:
            if (!s.zlocality) errs.add("/zlocality", "required for kind ZLocality");
            if (s.locus != Locus::Origin) errs.add("/locus", "ZLocality lives at the origin");
            break;
    }

    if (!errs.ok()) throw ScenarioError("invalid scenario (" + origin + ")", errs.list);
    return s;
}

inline Scenario parse_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError("cannot open scenario file", {path + ": no such file"});
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError("scenario is not valid JSON (" + path + ")", {e.what()});
    } catch (const json::exception& e) {
        // e.g. number literals past DBL_MAX: valid JSON text, unusable values.
        throw ScenarioError("scenario holds unrepresentable values (" + path + ")", {e.what()});
    }
    return parse_scenario_json(root, path);
}

// ---------------------------------------------------------------------------
// Canonical serialization (alphabetical keys, fully explicit fields).
// ---------------------------------------------------------------------------
namespace detail {

inline json fn_json(const FnSpec& fn) {
    json j;
    switch (fn.type) {
        case FnSpec::Type::PowerLaw:
            j["type"] = "power_law";
            j["c_plus"] = fn.c_plus;
            j["c_minus"] = fn.c_minus;
            j["parity"] = static_cast<unsigned>(fn.parity);
            j["exponent"] = fn.exponent;
            j["cutoff"] = fn.cutoff;
            j["window"] = fn.window == Window::None ? "None"
                          : fn.window == Window::Sharp ? "Sharp"
                                                       : "Smooth";
            break;
        case FnSpec::Type::BumpLike:
            j["type"] = "bump_like";
            j["center"] = fn.center;
            j["radius"] = fn.radius;
            j["scale"] = fn.scale;
            break;
        case FnSpec::Type::Poly:
            j["type"] = "poly";
            j["coeffs"] = fn.coeffs;
            break;
        case FnSpec::Type::LogSingular:
            j["type"] = "log_singular";
            j["a2"] = fn.a2;
            j["a1_plus"] = fn.a1_plus;
            j["a1_minus"] = fn.a1_minus;
            j["a0_plus"] = fn.a0_plus;
            j["a0_minus"] = fn.a0_minus;
            j["inner"] = fn.inner;
            j["outer"] = fn.outer;
            break;
    }
    return j;
}

inline json tf_json(const TestFunctionSpec& tf) {
    json j;
    switch (tf.type) {
        case TestFunctionSpec::Type::Bump:
            j["type"] = "bump";
            j["center"] = tf.center;
            j["radius"] = tf.radius;
            break;
        case TestFunctionSpec::Type::PolyBump:
            j["type"] = "poly_bump";
            j["center"] = tf.center;
            j["radius"] = tf.radius;
            j["coeffs"] = tf.coeffs;
            break;
        case TestFunctionSpec::Type::Gaussian:
            j["type"] = "gaussian";
            j["scale"] = tf.scale;
            break;
        case TestFunctionSpec::Type::Plateau:
            j["type"] = "plateau";
            j["inner"] = tf.inner;
            j["outer"] = tf.outer;
            break;
    }
    if (tf.max_order) j["max_order"] = *tf.max_order;
    return j;
}

}  // namespace detail

inline json scenario_json(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["kind"] = kind_name(s.kind);
    j["locus"] = s.locus == Locus::Infinity ? "Infinity" : "Origin";
    j["weight"] = {{"gevrey_s", s.gevrey_s}};
    j["L"] = s.L;
    j["alpha"] = s.alpha;
    j["terms"] = json::array();
    for (const auto& t : s.terms)
        j["terms"].push_back({{"order", t.order}, {"fn", detail::fn_json(t.fn)}});
    j["test_functions"] = json::array();
    for (const auto& tf : s.test_functions) j["test_functions"].push_back(detail::tf_json(tf));
    j["ladder"] = {{"base", s.ladder.base}, {"ratio", s.ladder.ratio}, {"count", s.ladder.count}};
    j["method"] = qa::method_name(s.method);
    j["tolerances"] = {{"rel_limit", s.tol.rel_limit},
                       {"residual", s.tol.residual},
                       {"quadrature", s.tol.quadrature},
                       {"tail", s.tol.tail}};
    if (s.kind == Kind::CombVerify) j["comb"] = {{"m_max", s.comb_m_max}};
    if (s.weights) j["weights"] = {{"ell", s.weights->ell}, {"p_max", s.weights->p_max}};
    if (s.structure) {
        json sec;
        sec["rows"] = json::array();
        for (const auto& r : s.structure->rows)
            sec["rows"].push_back({{"m", r.m}, {"c_plus", r.c_plus}, {"c_minus", r.c_minus}});
        if (s.structure->c_star) sec["c_star"] = *s.structure->c_star;
        if (s.structure->c_star1) sec["c_star1"] = *s.structure->c_star1;
        if (s.structure->c_star2) sec["c_star2"] = *s.structure->c_star2;
        j["structure"] = std::move(sec);
    }
    if (s.negint)
        j["negint"] = {{"c0_plus", s.negint->c0_plus}, {"c0_minus", s.negint->c0_minus}};
    if (s.extension) {
        const auto& e = *s.extension;
        json sec;
        sec["kind"] = e.kind == qa::ExtensionKind::NonIntegerPositive  ? "NonIntegerPositive"
                      : e.kind == qa::ExtensionKind::NonIntegerNegative ? "NonIntegerNegative"
                                                                        : "NegIntOrder";
        sec["big_n"] = e.big_n;
        sec["k"] = e.k;
        sec["c"] = e.c;
        sec["a"] = e.a;
        sec["atoms"] = e.atoms;
        j["extension"] = std::move(sec);
    }
    if (s.zlocality) j["zlocality"] = {{"n_cap", s.zlocality->n_cap}};
    return j;
}

inline std::string serialize_scenario(const Scenario& s) { return scenario_json(s).dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Building library objects from specs.
// ---------------------------------------------------------------------------
inline CoefficientFn build_fn(const FnSpec& fn, const SlowlyVaryingFn& L, Locus locus) {
    switch (fn.type) {
        case FnSpec::Type::PowerLaw:
            return CoefficientFn::power_law(fn.c_plus, fn.c_minus, fn.parity, fn.exponent, L,
                                            fn.cutoff, fn.window, locus);
        case FnSpec::Type::BumpLike:
            return CoefficientFn::bump_like(TestFunction::bump(fn.center, fn.radius), fn.scale);
        case FnSpec::Type::Poly:
            return CoefficientFn::poly(fn.coeffs);
        case FnSpec::Type::LogSingular:
            return CoefficientFn::log_singular(fn.a2, fn.a1_plus, fn.a1_minus, fn.a0_plus,
                                               fn.a0_minus, fn.inner, fn.outer);
    }
    throw std::logic_error("build_fn: unreachable");
}

inline TestFunction build_test_function(const TestFunctionSpec& tf) {
    switch (tf.type) {
        case TestFunctionSpec::Type::Bump:
            return tf.max_order ? TestFunction::bump(tf.center, tf.radius, *tf.max_order)
                                : TestFunction::bump(tf.center, tf.radius);
        case TestFunctionSpec::Type::PolyBump:
            return tf.max_order
                       ? TestFunction::poly_bump(tf.coeffs, tf.center, tf.radius, *tf.max_order)
                       : TestFunction::poly_bump(tf.coeffs, tf.center, tf.radius);
        case TestFunctionSpec::Type::Gaussian:
            return TestFunction::gaussian(tf.scale);
        case TestFunctionSpec::Type::Plateau:
            return tf.max_order ? TestFunction::plateau(tf.inner, tf.outer, *tf.max_order)
                                : TestFunction::plateau(tf.inner, tf.outer);
    }
    throw std::logic_error("build_test_function: unreachable");
}

inline StructuredUD build_structured(const Scenario& s, const SlowlyVaryingFn& L) {
    StructuredUD f;
    f.locus = s.locus;
    for (const auto& t : s.terms) f.terms.push_back({t.order, build_fn(t.fn, L, s.locus)});
    return f;
}

inline qa::StructuralData build_structural(const Scenario& s) {
    if (!s.structure) throw std::invalid_argument("scenario has no structure section");
    const double a = s.alpha;
    if (a < 0.0 && a == std::rint(a)) {
        const unsigned k = static_cast<unsigned>(-a);
        if (s.locus == Locus::Origin)
            return qa::StructuralData::origin_negint(k, s.structure->rows,
                                                     s.structure->c_star1.value_or(0.0),
                                                     s.structure->c_star2.value_or(0.0));
        return qa::StructuralData::negint(k, s.structure->rows, s.structure->c_star.value_or(0.0));
    }
    return qa::StructuralData::noninteger(a, s.structure->rows);
}

// ---------------------------------------------------------------------------
// Reports.
// ---------------------------------------------------------------------------
struct LadderRow {
    double scale = 0.0, ratio = 0.0, predicted = 0.0, abs_err = 0.0, rel_err = 0.0;
};

struct ReportItem {
    std::string label;
    bool pass = true;
    std::string note;
    std::vector<LadderRow> rows;
};

struct Report {
    Scenario scenario;
    std::vector<ReportItem> items;
    double wall_clock_seconds = 0.0;
    bool pass = false;
};

namespace detail {

inline void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& body) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(std::max(1u, jobs), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::mutex mu;
    std::exception_ptr first;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!first) first = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline LadderRow residual_row(double scale, double residual) {
    return {scale, residual, 0.0, std::fabs(residual), std::fabs(residual)};
}

inline bool residual_rows_pass(const std::vector<LadderRow>& rows, double tol) {
    if (rows.empty()) return false;
    const double last = std::fabs(rows.back().ratio);
    return last <= tol && last <= std::fabs(rows.front().ratio) + tol;
}

// Ratio ladder with per-point parallelism; numerically identical to the
// sequential path for any job count.
inline qa::LimitEstimate limit_with_jobs(const StructuredUD& f, const SlowlyVaryingFn& L,
                                         double alpha, const TestFunction& phi,
                                         const qa::StructuralData& data, const qa::Ladder& ladder,
                                         qa::Method method, double quad_tol, unsigned jobs) {
    const auto scales = qa::make_scales(ladder, f.locus);
    std::vector<double> ratios(scales.size());
    parallel_for(scales.size(), jobs, [&](std::size_t i) {
        const double s = scales[i];
        ratios[i] = gfun::dilate_pair(f, s, phi, quad_tol) / (std::pow(s, alpha) * L(s));
    });
    qa::LimitEstimate est;
    est.method = method;
    for (std::size_t i = 0; i < scales.size(); ++i) est.ladder.push_back({scales[i], ratios[i]});
    est.extrapolated = qa::extrapolate(est.ladder, method);
    est.predicted = qa::predicted_pairing(data, f.locus, phi, quad_tol);
    est.abs_error = std::fabs(est.extrapolated - est.predicted);
    est.rel_error =
        est.predicted != 0.0 ? est.abs_error / std::fabs(est.predicted) : est.abs_error;
    est.settled = qa::ladder_settled(est.ladder);
    return est;
}

inline void run_comb(const Scenario& s, Report& rep) {
    ReportItem oracle{"recip-oracle", true, "", {}};
    for (unsigned m = 0; m <= s.comb_m_max && oracle.pass; ++m)
        for (unsigned j0 = 0; j0 <= 8; ++j0) {
            const auto pair = comb::recip_derivative_oracle(m, j0);
            if (!(pair.lhs == pair.rhs)) {
                oracle.pass = false;
                oracle.note = "mismatch at m=" + std::to_string(m) + ", j0=" + std::to_string(j0);
                break;
            }
        }
    if (oracle.pass) oracle.note = "exact match for m <= " + std::to_string(s.comb_m_max);
    rep.items.push_back(std::move(oracle));

    ReportItem bound{"coefficient-bound", true, "", {}};
    try {
        for (unsigned m = 0; m <= 20; ++m)
            for (unsigned j = 0; j <= m; ++j) comb::recip_coeff(m, j);
        bound.note = "|c_{m,j}| <= (m!/j!) 4^m for m <= 20";
    } catch (const std::exception& e) {
        bound.pass = false;
        bound.note = e.what();
    }
    rep.items.push_back(std::move(bound));

    ReportItem stirling{"stirling2-bound", comb::stirling2_bound_check(30),
                        "entrywise bound up to k = 30", {}};
    rep.items.push_back(std::move(stirling));

    ReportItem chain{"exp-chain", comb::exp_chain_check(10, 4),
                     "formal identity for n <= 10, deg <= 4", {}};
    rep.items.push_back(std::move(chain));
}

inline void run_weights(const Scenario& s, Report& rep) {
    const auto& ws = *s.weights;
    const auto M = weights::WeightSequence::gevrey(s.gevrey_s, std::max<std::size_t>(ws.p_max, 64));
    for (double ell : ws.ell) {
        ReportItem item{"ell-" + fmt(ell), true, "", {}};
        try {
            const auto bounds = weights::estimate_tail_constants(M, ell, ws.p_max, s.tol.tail);
            item.pass = bounds.satisfied && bounds.max_tail_bound < s.tol.tail;
            item.note = "C_factorial=" + fmt(bounds.C_factorial) +
                        " C_stirling=" + fmt(bounds.C_stirling) +
                        " tail<=" + fmt(bounds.max_tail_bound);
        } catch (const std::exception& e) {
            item.pass = false;
            item.note = e.what();
        }
        rep.items.push_back(std::move(item));
    }
}

inline void run_quasi_limit(const Scenario& s, unsigned jobs, Report& rep) {
    const auto L = SlowlyVaryingFn::parse(s.L, s.locus);
    const auto f = build_structured(s, L);
    const auto data = build_structural(s);
    rep.items.resize(s.test_functions.size());
    parallel_for(s.test_functions.size(), 1, [&](std::size_t i) {
        ReportItem item{"phi" + std::to_string(i), true, "", {}};
        try {
            const auto phi = build_test_function(s.test_functions[i]);
            const auto est = limit_with_jobs(f, L, s.alpha, phi, data, s.ladder, s.method,
                                             s.tol.quadrature, jobs);
            for (const auto& p : est.ladder) {
                const double abs_err = std::fabs(p.ratio - est.predicted);
                const double rel_err =
                    est.predicted != 0.0 ? abs_err / std::fabs(est.predicted) : abs_err;
                item.rows.push_back({p.scale, p.ratio, est.predicted, abs_err, rel_err});
            }
            item.pass = est.settled && est.rel_error <= s.tol.rel_limit;
            item.note = "extrapolated=" + fmt(est.extrapolated) +
                        " predicted=" + fmt(est.predicted) + " rel_error=" + fmt(est.rel_error) +
                        (est.settled ? "" : " (ladder not settled)");
        } catch (const std::exception& e) {
            item.pass = false;
            item.note = e.what();
        }
        rep.items[i] = std::move(item);
    });
}

inline void run_negint(const Scenario& s, unsigned jobs, Report& rep) {
    const auto L = SlowlyVaryingFn::parse(s.L, s.locus);
    const auto f0 = build_fn(s.terms.front().fn, L, s.locus);
    rep.items.resize(s.test_functions.size());
    parallel_for(s.test_functions.size(), jobs, [&](std::size_t i) {
        ReportItem item{"phi" + std::to_string(i), true, "", {}};
        try {
            const auto phi = build_test_function(s.test_functions[i]);
            const auto r = qa::negint_expansion_check(f0, s.negint->c0_plus, s.negint->c0_minus, L,
                                                      phi, s.ladder, s.tol.residual,
                                                      s.tol.quadrature);
            for (const auto& p : r.residuals) item.rows.push_back(residual_row(p.scale, p.ratio));
            item.pass = r.converged;
            item.note = "fitted_decay=" + fmt(r.fitted_decay) + " pf_plus=" + fmt(r.pf_plus) +
                        " pf_minus=" + fmt(r.pf_minus);
        } catch (const std::exception& e) {
            item.pass = false;
            item.note = e.what();
        }
        rep.items[i] = std::move(item);
    });
}

inline void run_extension(const Scenario& s, Report& rep) {
    const auto L = SlowlyVaryingFn::parse(s.L, s.locus);
    const auto f = build_structured(s, L);
    const auto& sec = *s.extension;
    qa::ExtensionData data;
    data.kind = sec.kind;
    data.alpha = s.alpha;
    data.big_n = sec.big_n;
    data.k = sec.k;
    data.c = sec.c;
    data.a = sec.a;
    std::vector<TestFunction> phis;
    for (const auto& tf : s.test_functions) phis.push_back(build_test_function(tf));
    try {
        const auto r = qa::extension_expansion(f, sec.atoms, data, L, phis, s.ladder,
                                               s.tol.residual, s.tol.quadrature);
        for (std::size_t i = 0; i < phis.size(); ++i) {
            ReportItem item{"phi" + std::to_string(i), true, "", {}};
            for (const auto& row : r.residuals[i])
                item.rows.push_back(residual_row(row.scale, row.residual));
            item.pass = residual_rows_pass(item.rows, s.tol.residual);
            rep.items.push_back(std::move(item));
        }
        if (r.has_dehaan) {
            ReportItem bitem{"primitive-b", true, "", {}};
            for (const auto& b : r.b_values) bitem.rows.push_back({b.scale, b.ratio, 0, 0, 0});
            rep.items.push_back(std::move(bitem));
            ReportItem ditem{"dehaan", r.dehaan.converged,
                             "c_effective=" + fmt(r.dehaan.c_effective), {}};
            rep.items.push_back(std::move(ditem));
        }
    } catch (const std::exception& e) {
        rep.items.push_back({"extension", false, e.what(), {}});
    }
}

inline void run_zlocality(const Scenario& s, Report& rep) {
    const auto L = SlowlyVaryingFn::parse(s.L, s.locus);
    const auto f = build_structured(s, L);
    const auto M = weights::WeightSequence::gevrey(s.gevrey_s, 64);
    for (std::size_t i = 0; i < s.test_functions.size(); ++i) {
        try {
            const auto psi = build_test_function(s.test_functions[i]);
            const auto r = qa::zspace_locality_check(f, M, psi, s.zlocality->n_cap, s.ladder,
                                                     s.tol.residual, s.tol.quadrature);
            for (std::size_t n = 0; n < r.scaled.size(); ++n) {
                ReportItem item{"psi" + std::to_string(i) + "-n" + std::to_string(n), true, "", {}};
                for (std::size_t j = 0; j < r.eps.size(); ++j)
                    item.rows.push_back(residual_row(r.eps[j], r.scaled[n][j]));
                item.pass = std::fabs(item.rows.back().ratio) <= s.tol.residual;
                if (n == 0) item.note = "psi_norm=" + fmt(r.psi_norm.value);
                rep.items.push_back(std::move(item));
            }
        } catch (const std::exception& e) {
            rep.items.push_back({"psi" + std::to_string(i), false, e.what(), {}});
        }
    }
}

}  // namespace detail

inline Report run_scenario(const Scenario& s, unsigned jobs = 1) {
    const auto t0 = std::chrono::steady_clock::now();
    Report rep;
    rep.scenario = s;
    switch (s.kind) {
        case Kind::CombVerify: detail::run_comb(s, rep); break;
        case Kind::WeightsVerify: detail::run_weights(s, rep); break;
        case Kind::QuasiLimit: detail::run_quasi_limit(s, jobs, rep); break;
        case Kind::NegIntExpansion: detail::run_negint(s, jobs, rep); break;
        case Kind::Extension: detail::run_extension(s, rep); break;
        case Kind::ZLocality: detail::run_zlocality(s, rep); break;
    }
    rep.pass = !rep.items.empty();
    for (const auto& item : rep.items) rep.pass = rep.pass && item.pass;
    rep.wall_clock_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

inline json report_json(const Report& rep) {
    json j;
    j["scenario"] = scenario_json(rep.scenario);
    j["pass"] = rep.pass;
    j["wall_clock_seconds"] = rep.wall_clock_seconds;
    j["items"] = json::array();
    for (const auto& item : rep.items) {
        json ji;
        ji["label"] = item.label;
        ji["pass"] = item.pass;
        ji["note"] = item.note;
        ji["rows"] = json::array();
        for (const auto& r : item.rows)
            ji["rows"].push_back({{"scale", r.scale},
                                  {"ratio", r.ratio},
                                  {"predicted", r.predicted},
                                  {"abs_err", r.abs_err},
                                  {"rel_err", r.rel_err}});
        j["items"].push_back(std::move(ji));
    }
    return j;
}

inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline std::string csv_text(const ReportItem& item) {
    std::string out = "scale,ratio,predicted,abs_err,rel_err\n";
    char buf[200];
    for (const auto& r : item.rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.scale, r.ratio,
                      r.predicted, r.abs_err, r.rel_err);
        out += buf;
    }
    return out;
}

// <out>/<name>.json plus one <out>/<name>-<label>.csv per ladder item.
inline std::vector<std::filesystem::path> write_report_files(const Report& rep,
                                                             const std::filesystem::path& out_dir) {
    std::vector<std::filesystem::path> written;
    const auto jpath = out_dir / (rep.scenario.name + ".json");
    write_file_atomic(jpath, report_json(rep).dump(2) + "\n");
    written.push_back(jpath);
    for (const auto& item : rep.items) {
        if (item.rows.empty()) continue;
        const auto cpath = out_dir / (rep.scenario.name + "-" + item.label + ".csv");
        write_file_atomic(cpath, csv_text(item));
        written.push_back(cpath);
    }
    return written;
}

}  // namespace qakit::scenario
