#include "galaxy/spec.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "galaxy/errors.hpp"

namespace galaxy {

using nlohmann::json;

std::string cmp_op_name(CmpOp op) { return op == CmpOp::LE ? "le" : "ge"; }

CmpOp cmp_op_from_name(const std::string& name) {
    if (name == "le") return CmpOp::LE;
    if (name == "ge") return CmpOp::GE;
    throw ParseError("unknown comparison op: " + name);
}

static void check_finite(const std::vector<double>& v, const std::string& what) {
    for (double x : v)
        if (!std::isfinite(x)) throw ShapeError(what + ": non-finite value");
}

static void validate_spec(const Specification& spec) {
    if (spec.input_dim == 0) throw ShapeError("spec: input_dim must be positive");
    if (!(spec.domain_bound > 0.0)) throw ShapeError("spec: domain_bound must be positive");
    for (std::size_t i = 0; i < spec.preconditions.size(); ++i) {
        const InputConstraint& c = spec.preconditions[i];
        const std::string where = "pre[" + std::to_string(i) + "]";
        if (const auto* box = std::get_if<BoxConstraint>(&c)) {
            if (box->lower.size() != spec.input_dim || box->upper.size() != spec.input_dim)
                throw ShapeError(where + ": box bound length != input_dim");
            check_finite(box->lower, where);
            check_finite(box->upper, where);
        } else if (const auto* lin = std::get_if<LinearConstraint>(&c)) {
            if (lin->coeffs.size() != spec.input_dim)
                throw ShapeError(where + ": coeffs length != input_dim");
            check_finite(lin->coeffs, where);
            if (!std::isfinite(lin->rhs)) throw ShapeError(where + ": non-finite rhs");
        } else if (const auto* ball = std::get_if<DistanceBallConstraint>(&c)) {
            if (ball->center.size() != spec.input_dim)
                throw ShapeError(where + ": center length != input_dim");
            check_finite(ball->center, where);
            if (!std::isfinite(ball->radius)) throw ShapeError(where + ": non-finite radius");
        }
    }
    if (const auto* lo = std::get_if<LinearOutProperty>(&spec.postcondition)) {
        if (lo->coeffs.empty()) throw ShapeError("post: empty coeffs");
        check_finite(lo->coeffs, "post");
        if (!std::isfinite(lo->rhs)) throw ShapeError("post: non-finite rhs");
    }
}

std::vector<ConstantRef> spec_constants(const Specification& spec) {
    std::vector<ConstantRef> out;
    for (std::size_t i = 0; i < spec.preconditions.size(); ++i) {
        const std::string p = "pre[" + std::to_string(i) + "]";
        const InputConstraint& c = spec.preconditions[i];
        if (const auto* box = std::get_if<BoxConstraint>(&c)) {
            for (std::size_t j = 0; j < box->lower.size(); ++j)
                out.push_back({p + ".lower[" + std::to_string(j) + "]", box->lower[j]});
            for (std::size_t j = 0; j < box->upper.size(); ++j)
                out.push_back({p + ".upper[" + std::to_string(j) + "]", box->upper[j]});
        } else if (const auto* lin = std::get_if<LinearConstraint>(&c)) {
            out.push_back({p + ".rhs", lin->rhs});
        } else if (const auto* ball = std::get_if<DistanceBallConstraint>(&c)) {
            for (std::size_t j = 0; j < ball->center.size(); ++j)
                out.push_back({p + ".center[" + std::to_string(j) + "]", ball->center[j]});
            out.push_back({p + ".radius", ball->radius});
        }
    }
    if (const auto* lo = std::get_if<LinearOutProperty>(&spec.postcondition))
        out.push_back({"post.rhs", lo->rhs});
    return out;
}

namespace {

struct ParsedPath {
    bool is_post = false;
    std::size_t pre_index = 0;
    std::string field;
    std::optional<std::size_t> element;
};

ParsedPath parse_path(const std::string& path) {
    ParsedPath p;
    std::string rest;
    if (path.rfind("post.", 0) == 0) {
        p.is_post = true;
        rest = path.substr(5);
    } else if (path.rfind("pre[", 0) == 0) {
        std::size_t close = path.find(']');
        if (close == std::string::npos || close + 1 >= path.size() || path[close + 1] != '.')
            throw ParseError("bad constant path: " + path);
        p.pre_index = std::stoul(path.substr(4, close - 4));
        rest = path.substr(close + 2);
    } else {
        throw ParseError("bad constant path: " + path);
    }
    std::size_t bracket = rest.find('[');
    if (bracket == std::string::npos) {
        p.field = rest;
    } else {
        p.field = rest.substr(0, bracket);
        std::size_t close = rest.find(']', bracket);
        if (close == std::string::npos) throw ParseError("bad constant path: " + path);
        p.element = std::stoul(rest.substr(bracket + 1, close - bracket - 1));
    }
    return p;
}

double* locate_constant(Specification& spec, const std::string& path) {
    ParsedPath p = parse_path(path);
    if (p.is_post) {
        auto* lo = std::get_if<LinearOutProperty>(&spec.postcondition);
        if (lo && p.field == "rhs") return &lo->rhs;
        return nullptr;
    }
    if (p.pre_index >= spec.preconditions.size()) return nullptr;
    InputConstraint& c = spec.preconditions[p.pre_index];
    if (auto* box = std::get_if<BoxConstraint>(&c)) {
        if (p.field == "lower" && p.element && *p.element < box->lower.size())
            return &box->lower[*p.element];
        if (p.field == "upper" && p.element && *p.element < box->upper.size())
            return &box->upper[*p.element];
    } else if (auto* lin = std::get_if<LinearConstraint>(&c)) {
        if (p.field == "rhs") return &lin->rhs;
    } else if (auto* ball = std::get_if<DistanceBallConstraint>(&c)) {
        if (p.field == "radius") return &ball->radius;
        if (p.field == "center" && p.element && *p.element < ball->center.size())
            return &ball->center[*p.element];
    }
    return nullptr;
}

}  // namespace

double get_constant(const Specification& spec, const std::string& path) {
    double* slot = locate_constant(const_cast<Specification&>(spec), path);
    if (!slot) throw ParseError("no constant at path: " + path);
    return *slot;
}

void set_constant(Specification& spec, const std::string& path, double value) {
    double* slot = locate_constant(spec, path);
    if (!slot) throw ParseError("no constant at path: " + path);
    *slot = value;
}

bool is_threshold_path(const std::string& path) {
    return parse_path(path).field != "center";
}

bool eval_pre(const Specification& spec, const std::vector<double>& x) {
    return eval_pre_tol(spec, x, 0.0);
}

bool eval_pre_tol(const Specification& spec, const std::vector<double>& x, double tol) {
    if (x.size() != spec.input_dim) throw DimensionMismatch("eval_pre: input length");
    for (double v : x)
        if (std::abs(v) > spec.domain_bound + tol) return false;
    for (const InputConstraint& c : spec.preconditions) {
        if (const auto* box = std::get_if<BoxConstraint>(&c)) {
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i] < box->lower[i] - tol || x[i] > box->upper[i] + tol) return false;
        } else if (const auto* lin = std::get_if<LinearConstraint>(&c)) {
            double dot = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) dot += lin->coeffs[i] * x[i];
            if (lin->op == CmpOp::LE ? dot > lin->rhs + tol : dot < lin->rhs - tol) return false;
        } else if (const auto* ball = std::get_if<DistanceBallConstraint>(&c)) {
            for (std::size_t i = 0; i < x.size(); ++i)
                if (std::abs(x[i] - ball->center[i]) > ball->radius + tol) return false;
        }
    }
    return true;
}

bool eval_post(const Specification& spec, const std::vector<double>& x,
               const std::vector<double>& y) {
    (void)x;
    if (const auto* am = std::get_if<ArgmaxEqProperty>(&spec.postcondition))
        return argmax_label(y) == am->label;
    const auto& lo = std::get<LinearOutProperty>(spec.postcondition);
    if (y.size() != lo.coeffs.size()) throw DimensionMismatch("eval_post: output length");
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += lo.coeffs[i] * y[i];
    return lo.op == CmpOp::LE ? dot <= lo.rhs : dot >= lo.rhs;
}

bool eval_post_tol(const Specification& spec, const std::vector<double>& x,
                   const std::vector<double>& y, double tol) {
    // Robust satisfaction: the postcondition holds with margin > tol. Used so
    // that a near-boundary external counterexample is not branded invalid.
    (void)x;
    if (const auto* am = std::get_if<ArgmaxEqProperty>(&spec.postcondition)) {
        if (argmax_label(y) != am->label) return false;
        for (std::size_t j = 0; j < y.size(); ++j)
            if (j != am->label && y[am->label] - y[j] <= tol) return false;
        return true;
    }
    const auto& lo = std::get<LinearOutProperty>(spec.postcondition);
    if (y.size() != lo.coeffs.size()) throw DimensionMismatch("eval_post: output length");
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += lo.coeffs[i] * y[i];
    return lo.op == CmpOp::LE ? dot <= lo.rhs - tol : dot >= lo.rhs + tol;
}

bool precondition_definitely_empty(const Specification& spec) {
    // Intersect the clamp with every box and ball; Linear constraints are not
    // considered (they can only make an empty region emptier).
    std::vector<double> lo(spec.input_dim, -spec.domain_bound);
    std::vector<double> hi(spec.input_dim, spec.domain_bound);
    for (const InputConstraint& c : spec.preconditions) {
        if (const auto* box = std::get_if<BoxConstraint>(&c)) {
            for (std::size_t i = 0; i < spec.input_dim; ++i) {
                lo[i] = std::max(lo[i], box->lower[i]);
                hi[i] = std::min(hi[i], box->upper[i]);
            }
        } else if (const auto* ball = std::get_if<DistanceBallConstraint>(&c)) {
            if (ball->radius < 0.0) return true;
            for (std::size_t i = 0; i < spec.input_dim; ++i) {
                lo[i] = std::max(lo[i], ball->center[i] - ball->radius);
                hi[i] = std::min(hi[i], ball->center[i] + ball->radius);
            }
        }
    }
    for (std::size_t i = 0; i < spec.input_dim; ++i)
        if (lo[i] > hi[i]) return true;
    return false;
}

Specification robustness_spec(const std::vector<double>& center, double epsilon,
                              std::size_t label, double domain_bound) {
    check_finite(center, "robustness_spec center");
    if (!std::isfinite(epsilon)) throw ShapeError("robustness_spec: non-finite epsilon");
    Specification spec;
    spec.input_dim = center.size();
    spec.domain_bound = domain_bound;
    spec.preconditions.push_back(DistanceBallConstraint{center, epsilon});
    spec.postcondition = ArgmaxEqProperty{label};
    validate_spec(spec);
    return spec;
}

static json constraint_to_json(const InputConstraint& c) {
    json j;
    if (const auto* box = std::get_if<BoxConstraint>(&c)) {
        j["type"] = "box";
        j["lower"] = box->lower;
        j["upper"] = box->upper;
    } else if (const auto* lin = std::get_if<LinearConstraint>(&c)) {
        j["type"] = "linear";
        j["coeffs"] = lin->coeffs;
        j["op"] = cmp_op_name(lin->op);
        j["rhs"] = lin->rhs;
    } else if (const auto* ball = std::get_if<DistanceBallConstraint>(&c)) {
        j["type"] = "ball";
        j["metric"] = "linf";
        j["center"] = ball->center;
        j["radius"] = ball->radius;
    }
    return j;
}

static InputConstraint constraint_from_json(const json& j) {
    std::string type = j.at("type").get<std::string>();
    if (type == "box")
        return BoxConstraint{j.at("lower").get<std::vector<double>>(),
                             j.at("upper").get<std::vector<double>>()};
    if (type == "linear")
        return LinearConstraint{j.at("coeffs").get<std::vector<double>>(),
                                cmp_op_from_name(j.at("op").get<std::string>()),
                                j.at("rhs").get<double>()};
    if (type == "ball") {
        if (j.value("metric", "linf") != "linf")
            throw ParseError("unsupported ball metric: " + j.at("metric").get<std::string>());
        return DistanceBallConstraint{j.at("center").get<std::vector<double>>(),
                                      j.at("radius").get<double>()};
    }
    throw ParseError("unknown precondition type: " + type);
}

static json spec_to_json_obj(const Specification& spec) {
    json j;
    j["input_dim"] = spec.input_dim;
    j["domain_bound"] = spec.domain_bound;
    j["preconditions"] = json::array();
    for (const InputConstraint& c : spec.preconditions)
        j["preconditions"].push_back(constraint_to_json(c));
    json jp;
    if (const auto* am = std::get_if<ArgmaxEqProperty>(&spec.postcondition)) {
        jp["type"] = "argmax_eq";
        jp["label"] = am->label;
    } else {
        const auto& lo = std::get<LinearOutProperty>(spec.postcondition);
        jp["type"] = "linear_out";
        jp["coeffs"] = lo.coeffs;
        jp["op"] = cmp_op_name(lo.op);
        jp["rhs"] = lo.rhs;
    }
    j["postcondition"] = std::move(jp);
    j["constants"] = json::array();
    for (const ConstantRef& c : spec_constants(spec))
        j["constants"].push_back({{"path", c.path}, {"value", c.value}});
    return j;
}

static Specification spec_from_json_obj(const json& j) {
    Specification spec;
    try {
        spec.input_dim = j.at("input_dim").get<std::size_t>();
        spec.domain_bound = j.value("domain_bound", 10.0);
        for (const json& jc : j.at("preconditions"))
            spec.preconditions.push_back(constraint_from_json(jc));
        const json& jp = j.at("postcondition");
        std::string type = jp.at("type").get<std::string>();
        if (type == "argmax_eq") {
            spec.postcondition = ArgmaxEqProperty{jp.at("label").get<std::size_t>()};
        } else if (type == "linear_out") {
            spec.postcondition = LinearOutProperty{jp.at("coeffs").get<std::vector<double>>(),
                                                   cmp_op_from_name(jp.at("op").get<std::string>()),
                                                   jp.at("rhs").get<double>()};
        } else {
            throw ParseError("unknown postcondition type: " + type);
        }
        if (j.contains("constants")) {
            std::set<std::string> seen;
            std::vector<ConstantRef> derived = spec_constants(spec);
            if (j.at("constants").size() != derived.size())
                throw ParseError("constant table size disagrees with the constraints");
            for (const json& jc : j.at("constants")) {
                std::string path = jc.at("path").get<std::string>();
                if (!seen.insert(path).second)
                    throw ParseError("duplicate constant path: " + path);
                double value = jc.at("value").get<double>();
                if (get_constant(spec, path) != value)
                    throw ParseError("constant table disagrees with the constraints at " + path);
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("spec: ") + e.what());
    }
    validate_spec(spec);
    return spec;
}

std::string spec_to_json(const Specification& spec) { return spec_to_json_obj(spec).dump(); }

Specification spec_from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ParseError("spec: invalid JSON");
    return spec_from_json_obj(j);
}

Specification load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return spec_from_json_text(ss.str());
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    } catch (const ShapeError& e) {
        throw ShapeError(path + ": " + e.what());
    }
}

void save_spec(const Specification& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write spec file: " + path);
    out << spec_to_json_obj(spec).dump(2) << "\n";
}

void TestCase::validate() const {
    network.validate();
    if (spec.input_dim != network.input_dim)
        throw ShapeError("test case " + id + ": spec input_dim != network input_dim");
    if (const auto* am = std::get_if<ArgmaxEqProperty>(&spec.postcondition)) {
        if (am->label >= network.output_dim())
            throw ShapeError("test case " + id + ": argmax label out of range");
    } else if (const auto* lo = std::get_if<LinearOutProperty>(&spec.postcondition)) {
        if (lo->coeffs.size() != network.output_dim())
            throw ShapeError("test case " + id + ": post coeffs length != output_dim");
    }
}

bool violates(const TestCase& tc, const std::vector<double>& x) {
    if (x.size() != tc.spec.input_dim) throw DimensionMismatch("violates: input length");
    if (!eval_pre(tc.spec, x)) return false;
    return !eval_post(tc.spec, x, forward(tc.network, x));
}

bool violates_tol(const TestCase& tc, const std::vector<double>& x, double tol) {
    if (x.size() != tc.spec.input_dim) throw DimensionMismatch("violates: input length");
    if (!eval_pre_tol(tc.spec, x, tol)) return false;
    return !eval_post_tol(tc.spec, x, forward(tc.network, x), tol);
}

}  // namespace galaxy
