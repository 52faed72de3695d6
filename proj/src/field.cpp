#include "invflow/field.hpp"

#include <algorithm>
#include <string>

namespace invflow {

Domain::Domain(std::vector<Axis> axes, bool periodic) : axes_(std::move(axes)), periodic_(periodic) {
    if (axes_.empty() || axes_.size() > 2) throw InvalidScenario("domain: dimension must be 1 or 2");
    for (const auto& a : axes_) {
        if (!(a.lo < a.hi)) throw InvalidScenario("domain: each axis needs lo < hi");
        if (a.cells < 8) throw InvalidScenario("domain: each axis needs at least 8 cells");
        spacing_.push_back((a.hi - a.lo) / static_cast<double>(a.cells));
        extent_.push_back(periodic_ ? a.cells : a.cells + 1);
    }
}

double Domain::min_spacing() const { return *std::min_element(spacing_.begin(), spacing_.end()); }

std::size_t Domain::node_count() const {
    std::size_t n = 1;
    for (auto e : extent_) n *= e;
    return n;
}

std::array<std::size_t, 2> Domain::index(std::size_t node) const {
    if (dim() == 1) return {node, 0};
    return {node % extent_[0], node / extent_[0]};
}

Vector Domain::point(std::size_t node) const {
    const auto idx = index(node);
    Vector p(dim());
    for (std::size_t j = 0; j < dim(); ++j) p[j] = coordinate(j, idx[j]);
    return p;
}

bool Domain::on_boundary(std::size_t node) const {
    if (periodic_) return false;
    const auto idx = index(node);
    for (std::size_t j = 0; j < dim(); ++j)
        if (idx[j] == 0 || idx[j] + 1 == extent_[j]) return true;
    return false;
}

}  // namespace invflow
