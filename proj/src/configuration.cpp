#include "chiro/configuration.hpp"

#include <algorithm>
#include <set>

namespace chiro {

Configuration::Configuration(std::size_t dim, std::vector<std::pair<Label, Vec>> labeled_points)
    : dim_(dim) {
    if (dim == 0) throw error("configuration dimension must be positive");
    for (auto& [l, p] : labeled_points) {
        if (p.size() != dim) throw error("point dimension mismatch for label " + l);
        if (!points_.emplace(l, std::move(p)).second) throw error("duplicate label " + l);
        labels_.push_back(l);
    }
}

const Vec& Configuration::point(const Label& l) const {
    auto it = points_.find(l);
    if (it == points_.end()) throw error("unknown label " + l);
    return it->second;
}

void Configuration::add_point(const Label& l, Vec p) {
    if (p.size() != dim_) throw error("point dimension mismatch for label " + l);
    if (!points_.emplace(l, std::move(p)).second) throw error("duplicate label " + l);
    labels_.push_back(l);
}

void Configuration::set_point(const Label& l, Vec p) {
    auto it = points_.find(l);
    if (it == points_.end()) throw error("unknown label " + l);
    if (p.size() != dim_) throw error("point dimension mismatch for label " + l);
    it->second = std::move(p);
}

std::vector<Vec> Configuration::point_list() const { return point_list(labels_); }

std::vector<Vec> Configuration::point_list(const std::vector<Label>& subset) const {
    std::vector<Vec> out;
    out.reserve(subset.size());
    for (const auto& l : subset) out.push_back(point(l));
    return out;
}

Configuration Configuration::restrict(const std::vector<Label>& subset) const {
    std::vector<bool> take;
    std::set<Label> wanted(subset.begin(), subset.end());
    if (wanted.size() != subset.size()) throw error("restriction subset has duplicates");
    std::vector<std::pair<Label, Vec>> pts;
    for (const auto& l : labels_)
        if (wanted.count(l)) {
            pts.emplace_back(l, point(l));
            wanted.erase(l);
        }
    if (!wanted.empty()) throw error("restriction subset has unknown labels");
    return Configuration(dim_, std::move(pts));
}

bool Configuration::full_dimensional() const {
    return affine_rank(point_list()) == dim_ + 1;
}

bool Configuration::operator==(const Configuration& o) const {
    return dim_ == o.dim_ && labels_ == o.labels_ && points_ == o.points_;
}

std::vector<Label> ExtensionRecord::added_labels() const {
    std::vector<Label> out;
    for (const auto& l : extended.labels())
        if (!base.contains(l)) out.push_back(l);
    return out;
}

void ExtensionRecord::validate() const {
    if (base.dim() != extended.dim()) throw error("extension dimension mismatch");
    for (const auto& l : base.labels()) {
        if (!extended.contains(l)) throw error("extension lost base label " + l);
        if (extended.point(l) != base.point(l)) throw error("extension moved base point " + l);
    }
}

}  // namespace chiro
