#pragma once

#include <map>
#include <string>

#include "chiro/geometry.hpp"

namespace chiro {

using Label = std::string;

// Labeled affine point configuration in R^d with an ordered label set.
class Configuration {
  public:
    Configuration() = default;
    Configuration(std::size_t dim, std::vector<std::pair<Label, Vec>> labeled_points);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return labels_.size(); }
    const std::vector<Label>& labels() const { return labels_; }
    bool contains(const Label& l) const { return points_.count(l) > 0; }
    const Vec& point(const Label& l) const;
    void add_point(const Label& l, Vec p);  // appends to the label order
    void set_point(const Label& l, Vec p);  // replaces an existing point

    // Points listed in label order (optionally only a subset of labels).
    std::vector<Vec> point_list() const;
    std::vector<Vec> point_list(const std::vector<Label>& subset) const;

    // Restriction to a label subset, keeping this configuration's order.
    Configuration restrict(const std::vector<Label>& subset) const;

    bool full_dimensional() const;
    bool operator==(const Configuration& o) const;

  private:
    std::size_t dim_ = 0;
    std::vector<Label> labels_;
    std::map<Label, Vec> points_;
};

// Extension P-hat of a base configuration by extra labeled points.
struct ExtensionRecord {
    Configuration base;      // over X
    Configuration extended;  // over X plus the added labels, agreeing on X
    bool generic = false;    // no added point on a hyperplane spanned by the rest

    std::vector<Label> added_labels() const;
    void validate() const;  // throws if extended does not restrict to base
};

}  // namespace chiro
