#include "support/oracles.hpp"

#include <cmath>

#include "galaxy/verifiers.hpp"

namespace galaxy::testing {

std::vector<double> forward_reference(const Network& net, const std::vector<double>& x) {
    std::vector<double> cur = x;
    for (const Layer& l : net.layers) {
        std::vector<double> next(l.weights.rows);
        for (std::size_t r = 0; r < l.weights.rows; ++r) {
            double z = l.bias[r];
            for (std::size_t c = 0; c < l.weights.cols; ++c) z += l.weights.at(r, c) * cur[c];
            switch (l.activation) {
                case Activation::Linear: next[r] = z; break;
                case Activation::ReLU: next[r] = std::max(0.0, z); break;
                case Activation::Sigmoid: next[r] = 1.0 / (1.0 + std::exp(-z)); break;
            }
        }
        cur = std::move(next);
    }
    return cur;
}

namespace {

// Walks the full grid over `box`, calling fn(point) until it returns true.
template <typename Fn>
bool walk_grid(const BoundsBox& box, double step, Fn&& fn) {
    std::size_t n = box.dim();
    std::vector<std::size_t> counts(n);
    for (std::size_t i = 0; i < n; ++i)
        counts[i] = static_cast<std::size_t>(std::floor(box.width(i) / step)) + 1;
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> p(n);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i)
            p[i] = std::min(box.lower[i] + static_cast<double>(idx[i]) * step, box.upper[i]);
        if (fn(p)) return true;
        std::size_t i = 0;
        while (i < n && ++idx[i] >= counts[i] + 1) {  // +1 slot for the exact endpoint
            idx[i] = 0;
            ++i;
        }
        if (i == n) return false;
    }
}

}  // namespace

std::optional<std::vector<double>> grid_falsify(const TestCase& tc, double step) {
    BoundsBox box = precondition_bounding_box(tc.spec);
    if (box.empty) return std::nullopt;
    std::optional<std::vector<double>> found;
    walk_grid(box, step, [&](const std::vector<double>& p) {
        if (violates(tc, p)) {
            found = p;
            return true;
        }
        return false;
    });
    return found;
}

double grid_max_linear_out(const Network& net, const Specification& spec,
                           const std::vector<double>& coeffs, double step) {
    BoundsBox box = precondition_bounding_box(spec);
    double best = -1e300;
    walk_grid(box, step, [&](const std::vector<double>& p) {
        if (!eval_pre(spec, p)) return false;
        std::vector<double> y = forward_reference(net, p);
        double dot = 0.0;
        for (std::size_t i = 0; i < coeffs.size(); ++i) dot += coeffs[i] * y[i];
        best = std::max(best, dot);
        return false;
    });
    return best;
}

double lipschitz_bound(const Network& net, const std::vector<double>& coeffs) {
    double bound = 0.0;
    for (double c : coeffs) bound += std::abs(c);
    for (auto it = net.layers.rbegin(); it != net.layers.rend(); ++it) {
        double norm = 0.0;
        for (std::size_t r = 0; r < it->weights.rows; ++r) {
            double row = 0.0;
            for (std::size_t c = 0; c < it->weights.cols; ++c) row += std::abs(it->weights.at(r, c));
            norm = std::max(norm, row);
        }
        bound *= norm;
    }
    return bound;
}

}  // namespace galaxy::testing
