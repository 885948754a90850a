#pragma once

#include <cstddef>
#include <vector>

namespace dpp {

// A finite point configuration: sorted distinct support points with positive
// integer multiplicities.
class Configuration {
public:
    struct Atom {
        double x;
        int mult;
    };

    Configuration() = default;
    // Sorts and merges equal coordinates into multiplicities. Non-finite input
    // is a DomainError.
    static Configuration from_points(std::vector<double> points);
    static Configuration from_atoms(std::vector<Atom> atoms);

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::vector<double> support() const;
    // Each point repeated by its multiplicity, sorted.
    std::vector<double> points() const;

    std::size_t total() const;
    bool empty() const { return atoms_.empty(); }
    bool simple() const;        // no multiple points
    bool nonnegative() const;   // no mass on (-inf, 0)
    double min_gap() const;     // infinity for fewer than two atoms

    // number of points in [a, b)
    std::size_t count(double a, double b) const;
    // number of points in [a, b]
    std::size_t count_closed(double a, double b) const;

    Configuration restrict_to(double a, double b) const;  // [a, b]
    Configuration shifted(double u) const;                // tau_u

private:
    std::vector<Atom> atoms_;
};

}  // namespace dpp
