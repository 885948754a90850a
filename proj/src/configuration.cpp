#include "dpp/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpp/error.hpp"

namespace dpp {

Configuration Configuration::from_points(std::vector<double> points) {
    std::vector<Atom> atoms;
    atoms.reserve(points.size());
    for (double x : points) atoms.push_back({x, 1});
    return from_atoms(std::move(atoms));
}

Configuration Configuration::from_atoms(std::vector<Atom> atoms) {
    for (const auto& a : atoms) {
        require_domain(std::isfinite(a.x), "configuration points must be finite");
        require_domain(a.mult >= 1, "multiplicities must be positive");
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.x < b.x; });
    Configuration c;
    for (const auto& a : atoms) {
        if (!c.atoms_.empty() && c.atoms_.back().x == a.x)
            c.atoms_.back().mult += a.mult;
        else
            c.atoms_.push_back(a);
    }
    return c;
}

std::vector<double> Configuration::support() const {
    std::vector<double> s;
    s.reserve(atoms_.size());
    for (const auto& a : atoms_) s.push_back(a.x);
    return s;
}

std::vector<double> Configuration::points() const {
    std::vector<double> p;
    for (const auto& a : atoms_) p.insert(p.end(), a.mult, a.x);
    return p;
}

std::size_t Configuration::total() const {
    std::size_t n = 0;
    for (const auto& a : atoms_) n += a.mult;
    return n;
}

bool Configuration::simple() const {
    return std::all_of(atoms_.begin(), atoms_.end(), [](const Atom& a) { return a.mult == 1; });
}

bool Configuration::nonnegative() const { return atoms_.empty() || atoms_.front().x >= 0.0; }

double Configuration::min_gap() const {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < atoms_.size(); ++i) g = std::min(g, atoms_[i].x - atoms_[i - 1].x);
    return g;
}

std::size_t Configuration::count(double a, double b) const {
    std::size_t n = 0;
    for (const auto& at : atoms_)
        if (at.x >= a && at.x < b) n += at.mult;
    return n;
}

std::size_t Configuration::count_closed(double a, double b) const {
    std::size_t n = 0;
    for (const auto& at : atoms_)
        if (at.x >= a && at.x <= b) n += at.mult;
    return n;
}

Configuration Configuration::restrict_to(double a, double b) const {
    Configuration c;
    for (const auto& at : atoms_)
        if (at.x >= a && at.x <= b) c.atoms_.push_back(at);
    return c;
}

Configuration Configuration::shifted(double u) const {
    std::vector<Atom> atoms = atoms_;
    for (auto& a : atoms) a.x += u;
    return from_atoms(std::move(atoms));
}

}  // namespace dpp
