#include "merodim/preimage.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "merodim/parallel.hpp"
#include "merodim/regression.hpp"

namespace merodim {

double Rect::diameter() const
{
    return std::hypot(width(), height());
}

bool Rect::contains(Complex z, double margin) const
{
    return z.real() >= x0 - margin && z.real() <= x1 + margin && z.imag() >= y0 - margin && z.imag() <= y1 + margin;
}

double Rect::boundary_distance(Complex z) const
{
    const double x = z.real();
    const double y = z.imag();
    if (contains(z)) {
        return std::min({x - x0, x1 - x, y - y0, y1 - y});
    }
    const double dx = std::max({x0 - x, 0.0, x - x1});
    const double dy = std::max({y0 - y, 0.0, y - y1});
    return std::hypot(dx, dy);
}

namespace {

// Gauss-Kronrod 7-15 on [-1, 1].
constexpr std::array<double, 8> gk_nodes{
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kronrod_weights{
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for gk_nodes[1], [3], [5], [7].
constexpr std::array<double, 4> gauss_weights{0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                              0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

constexpr std::size_t max_segments_per_edge = 200000;
// Initial panel length. A single 15-point panel spanning many periods can
// alias an oscillating integrand into a small error estimate.
constexpr double max_initial_panel = 0.5;

class LogDerivative {
public:
    LogDerivative(const FamilySpec& f, Complex a, double clearance) : f_(f), a_(a), clearance_(clearance) {}

    // f'(z) / (f(z) - a)
    Complex operator()(Complex z) const
    {
        const auto j = jet(f_, z);
        if (!j) {
            throw BoundaryCollision("pole on the contour");
        }
        const Complex g = j->value - a_;
        if (std::abs(g) <= clearance_ * std::abs(j->deriv)) {
            throw BoundaryCollision("solution within clearance of the contour");
        }
        return j->deriv / g;
    }

private:
    const FamilySpec& f_;
    Complex a_;
    double clearance_;
};

struct GkResult {
    Complex kronrod;
    double error;
};

GkResult gauss_kronrod(const LogDerivative& h, Complex z0, Complex z1)
{
    const Complex mid = 0.5 * (z0 + z1);
    const Complex half = 0.5 * (z1 - z0);
    Complex k{};
    Complex g{};
    for (std::size_t i = 0; i < gk_nodes.size(); ++i) {
        if (gk_nodes[i] == 0.0) {
            const Complex v = h(mid);
            k += kronrod_weights[i] * v;
            g += gauss_weights[3] * v;
            continue;
        }
        const Complex v = h(mid - gk_nodes[i] * half) + h(mid + gk_nodes[i] * half);
        k += kronrod_weights[i] * v;
        if (i % 2 == 1) {
            g += gauss_weights[i / 2] * v;
        }
    }
    return {k * half, std::abs((k - g) * half)};
}

// Adaptive integral of h along the segment z0 -> z1 to absolute tolerance tol.
Complex integrate_edge(const LogDerivative& h, Complex z0, Complex z1, double tol, double min_length)
{
    const double length = std::abs(z1 - z0);
    Complex total{};
    const std::size_t panels = static_cast<std::size_t>(std::ceil(length / max_initial_panel));
    std::vector<std::pair<double, double>> stack;
    stack.reserve(panels + 64);
    for (std::size_t i = panels; i-- > 0;) {
        stack.emplace_back(static_cast<double>(i) / panels, static_cast<double>(i + 1) / panels);
    }
    std::size_t segments = 0;
    while (!stack.empty()) {
        const auto [ta, tb] = stack.back();
        stack.pop_back();
        const Complex za = z0 + ta * (z1 - z0);
        const Complex zb = z0 + tb * (z1 - z0);
        const GkResult r = gauss_kronrod(h, za, zb);
        const double seg = (tb - ta) * length;
        if (r.error <= tol * (tb - ta)) {
            total += r.kronrod;
            continue;
        }
        if (seg < min_length) {
            throw BoundaryCollision("contour integrand unresolved near the boundary");
        }
        if (++segments > max_segments_per_edge) {
            throw QuadratureNotConverged("winding integral needs too many segments");
        }
        const double tm = 0.5 * (ta + tb);
        stack.emplace_back(tm, tb);
        stack.emplace_back(ta, tm);
    }
    return total;
}

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform in [0, 1) from a hash.
double unit(std::uint64_t h)
{
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

struct Cell {
    Rect rect;
    int count = 0;
    std::uint64_t id = 0;
};

struct CellOutcome {
    std::vector<Cell> children;
    std::optional<Complex> root;
    std::size_t cells_examined = 0;
    std::size_t retries = 0;
};

std::optional<Complex> newton_in_cell(const FamilySpec& f, Complex a, const Rect& rect, double tol)
{
    Complex z = rect.center();
    for (int it = 0; it < 60; ++it) {
        const auto j = jet(f, z);
        if (!j || j->deriv == Complex{}) {
            return std::nullopt;
        }
        const Complex step = (j->value - a) / j->deriv;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) {
            return std::nullopt;
        }
        z -= step;
        if (std::abs(step) < tol * std::max(1.0, std::abs(z))) {
            // One more step to settle the last bits.
            if (const auto j2 = jet(f, z); j2 && j2->deriv != Complex{}) {
                const Complex s2 = (j2->value - a) / j2->deriv;
                if (std::abs(s2) < std::abs(step) || std::abs(s2) < 1e-15 * std::max(1.0, std::abs(z))) {
                    z -= s2;
                }
            }
            if (!rect.contains(z, 1e-9 * std::max(1.0, std::abs(z)))) {
                return std::nullopt;
            }
            return z;
        }
    }
    return std::nullopt;
}

CellOutcome process_cell(const FamilySpec& f, Complex a, const Cell& cell, const SolverOptions& opt)
{
    CellOutcome out;
    if (cell.count == 0) {
        return out;
    }
    if (cell.count == 1 && cell.rect.diameter() <= opt.leaf_diameter) {
        if (auto z = newton_in_cell(f, a, cell.rect, opt.newton_tolerance)) {
            out.root = z;
            return out;
        }
        // NewtonDiverged: fall through and subdivide the cell further.
    }
    const double scale = std::max(1.0, std::abs(cell.rect.center()));
    if (cell.rect.diameter() < 1e-9 * scale) {
        if (cell.count > 1) {
            throw CountMismatch("solutions cluster below resolution (multiple root?)");
        }
        throw NewtonDiverged("Newton iteration failed in a certified single-root cell");
    }

    for (int attempt = 0; attempt <= opt.max_retries; ++attempt) {
        const std::uint64_t h = splitmix64(cell.id ^ splitmix64(opt.seed + static_cast<std::uint64_t>(attempt)));
        const double fx = 0.5 + 0.2 * (unit(h) - 0.5);
        const double fy = 0.5 + 0.2 * (unit(splitmix64(h)) - 0.5);
        const Rect& r = cell.rect;
        const double xm = r.x0 + fx * r.width();
        const double ym = r.y0 + fy * r.height();
        const std::array<Rect, 4> parts{Rect{r.x0, xm, r.y0, ym}, Rect{xm, r.x1, r.y0, ym}, Rect{r.x0, xm, ym, r.y1},
                                        Rect{xm, r.x1, ym, r.y1}};
        std::vector<Cell> children;
        int sum = 0;
        bool collided = false;
        for (std::size_t k = 0; k < parts.size(); ++k) {
            ++out.cells_examined;
            try {
                const int c = count_zeros_in_rectangle(f, a, parts[k], opt.boundary_clearance);
                sum += c;
                children.push_back({parts[k], c, splitmix64(cell.id * 4 + k + 1)});
            } catch (const BoundaryCollision&) {
                collided = true;
                break;
            }
        }
        if (!collided && sum == cell.count) {
            out.children = std::move(children);
            return out;
        }
        ++out.retries;
    }
    throw CountMismatch("subdivision counts do not add up after retries");
}

Preimage make_preimage(const FamilySpec& f, Complex a, Complex z)
{
    const EvalResult v = eval(f, z);
    return {z, a, std::abs(v.value() - a), std::abs(z)};
}

void sort_preimages(std::vector<Preimage>& v)
{
    std::sort(v.begin(), v.end(),
              [](const Preimage& x, const Preimage& y) { return modulus_then_arg_less(x.point, y.point); });
}

} // namespace

int count_zeros_in_rectangle(const FamilySpec& f, Complex a, const Rect& rect, double clearance)
{
    if (!(rect.x1 > rect.x0) || !(rect.y1 > rect.y0)) {
        throw std::invalid_argument("count_zeros_in_rectangle: empty rectangle");
    }
    int pole_count = 0;
    for (const PoleData& p : poles_in_disk(f, rect.center(), 0.5 * rect.diameter() + clearance)) {
        if (rect.boundary_distance(p.location) < clearance) {
            throw BoundaryCollision("pole within clearance of the rectangle boundary");
        }
        if (rect.contains(p.location)) {
            pole_count += p.multiplicity;
        }
    }

    const LogDerivative h(f, a, clearance);
    const std::array<Complex, 4> corners{Complex{rect.x0, rect.y0}, Complex{rect.x1, rect.y0},
                                         Complex{rect.x1, rect.y1}, Complex{rect.x0, rect.y1}};
    const double min_length = 1e-3 * clearance;
    for (const double tol : {1e-4, 1e-7, 1e-10}) {
        Complex total{};
        for (std::size_t k = 0; k < 4; ++k) {
            total += integrate_edge(h, corners[k], corners[(k + 1) % 4], tol, min_length);
        }
        const Complex winding = total / Complex{0.0, 2.0 * pi};
        const double nearest = std::round(winding.real());
        if (std::abs(winding - nearest) < 0.25) {
            const int zeros = static_cast<int>(nearest) + pole_count;
            if (zeros < 0) {
                throw QuadratureNotConverged("negative zero count");
            }
            return zeros;
        }
    }
    throw QuadratureNotConverged("winding number did not settle near an integer");
}

PreimageSearch find_preimages_in_rect(const FamilySpec& f, Complex a, const Rect& rect, const SolverOptions& opt)
{
    PreimageSearch result;
    result.enclosing_count = count_zeros_in_rectangle(f, a, rect, opt.boundary_clearance);
    result.cells_examined = 1;

    std::vector<Cell> frontier{{rect, result.enclosing_count, splitmix64(opt.seed)}};
    std::vector<Complex> roots;
    while (!frontier.empty()) {
        std::vector<CellOutcome> outcomes(frontier.size());
        parallel_for(frontier.size(), opt.threads,
                     [&](std::size_t i) { outcomes[i] = process_cell(f, a, frontier[i], opt); });
        std::vector<Cell> next;
        for (auto& o : outcomes) {
            result.cells_examined += o.cells_examined;
            result.retries += o.retries;
            if (o.root) {
                roots.push_back(*o.root);
            }
            for (auto& c : o.children) {
                if (c.count > 0) {
                    next.push_back(c);
                }
            }
        }
        frontier = std::move(next);
    }

    result.leaf_count_sum = static_cast<int>(roots.size());
    if (result.leaf_count_sum != result.enclosing_count) {
        throw CountMismatch("leaf roots do not match the enclosing count");
    }
    result.preimages.reserve(roots.size());
    for (const Complex z : roots) {
        result.preimages.push_back(make_preimage(f, a, z));
    }
    sort_preimages(result.preimages);
    for (std::size_t i = 1; i < result.preimages.size(); ++i) {
        // Cells are disjoint, so coincident roots mean Newton jumped cells.
        for (std::size_t j = i; j-- > 0;) {
            if (result.preimages[i].modulus - result.preimages[j].modulus > 1e-8) {
                break;
            }
            if (std::abs(result.preimages[i].point - result.preimages[j].point) <= 1e-8) {
                throw CountMismatch("duplicate root returned by distinct cells");
            }
        }
    }
    return result;
}

PreimageSearch search_preimages(const FamilySpec& f, Complex a, double radius, const SolverOptions& opt)
{
    if (!(radius > 0.0)) {
        throw std::invalid_argument("search_preimages: radius must be positive");
    }
    PreimageSearch search;
    bool done = false;
    for (int attempt = 0; attempt <= opt.max_retries && !done; ++attempt) {
        const std::uint64_t h = splitmix64(opt.seed ^ (0xabcdefULL + static_cast<std::uint64_t>(attempt)));
        const double jitter = 1e-3 * std::max(1.0, radius);
        const double shift_x = jitter * 0.1 * (unit(h) - 0.5);
        const double shift_y = jitter * 0.1 * (unit(splitmix64(h)) - 0.5);
        const double half = radius + jitter * (0.5 + unit(splitmix64(h + 1)));
        const Rect square{shift_x - half, shift_x + half, shift_y - half, shift_y + half};
        try {
            SolverOptions o = opt;
            o.seed = splitmix64(opt.seed + static_cast<std::uint64_t>(attempt));
            search = find_preimages_in_rect(f, a, square, o);
            search.retries += static_cast<std::size_t>(attempt);
            done = true;
        } catch (const BoundaryCollision&) {
        }
    }
    if (!done) {
        throw BoundaryCollision("enclosing square collides with the solution set after retries");
    }
    std::erase_if(search.preimages, [radius](const Preimage& p) { return p.modulus > radius; });
    return search;
}

std::vector<Preimage> find_preimages(const FamilySpec& f, Complex a, double radius, const SolverOptions& opt)
{
    return search_preimages(f, a, radius, opt).preimages;
}

std::vector<CountingSample> counting_function(std::span<const Preimage> preimages, std::span<const double> radii)
{
    if (!std::is_sorted(radii.begin(), radii.end())) {
        throw std::invalid_argument("counting_function: radii must be sorted ascending");
    }
    std::vector<double> moduli;
    moduli.reserve(preimages.size());
    for (const auto& p : preimages) {
        moduli.push_back(p.modulus);
    }
    std::sort(moduli.begin(), moduli.end());
    std::vector<CountingSample> out;
    out.reserve(radii.size());
    for (const double r : radii) {
        const auto n = std::upper_bound(moduli.begin(), moduli.end(), r) - moduli.begin();
        out.push_back({r, static_cast<std::size_t>(n)});
    }
    return out;
}

double estimate_order_of_growth(std::span<const CountingSample> samples)
{
    std::vector<CountingSample> usable;
    for (const auto& s : samples) {
        if (s.count >= 1 && s.radius > 0.0) {
            usable.push_back(s);
        }
    }
    if (usable.size() < 5) {
        throw InsufficientData("estimate_order_of_growth: need at least 5 samples with N(r) >= 1");
    }
    std::sort(usable.begin(), usable.end(),
              [](const CountingSample& a, const CountingSample& b) { return a.radius < b.radius; });
    const std::size_t start = usable.size() / 2;
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = start; i < usable.size(); ++i) {
        x.push_back(std::log(usable[i].radius));
        y.push_back(std::log(static_cast<double>(usable[i].count)));
    }
    return fit_line(x, y).slope;
}

void write_preimages_csv(std::ostream& os, std::span<const Preimage> preimages)
{
    const auto old = os.precision(17);
    os << "re,im,modulus,residual\n";
    for (const auto& p : preimages) {
        os << p.point.real() << ',' << p.point.imag() << ',' << p.modulus << ',' << p.residual << '\n';
    }
    os.precision(old);
}

} // namespace merodim
