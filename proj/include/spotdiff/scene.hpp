#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "spotdiff/errors.hpp"
#include "spotdiff/rng.hpp"
#include "spotdiff/taxonomy.hpp"

namespace spotdiff {

inline constexpr const char* kFloorId = "FLOOR";
inline constexpr const char* kFloorCategory = "floor";

// Directed placement graph over categories: which categories may sit on a
// surface of a given category. Lookups resolve both sides through ancestor
// chains, so "fruit on plate" licenses an apple on a plate.
class PlacementGraph {
public:
    static PlacementGraph parse(std::istream& in) {
        PlacementGraph g;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = Taxonomy::strip_comment(line);
            if (s.empty()) continue;
            auto sep = s.find(':');
            if (sep == std::string::npos)
                throw ParseError("placement line " + std::to_string(lineno) + ": missing ':'");
            std::string surface = Taxonomy::trim(s.substr(0, sep));
            std::string rest = s.substr(sep + 1);
            std::istringstream items(rest);
            std::string item;
            while (std::getline(items, item, ',')) {
                item = Taxonomy::trim(item);
                if (!item.empty()) g.edges_[surface].push_back(item);
            }
        }
        return g;
    }

    void validate(const Taxonomy& taxonomy) const {
        for (const auto& [surface, targets] : edges_) {
            if (surface != kFloorCategory && !taxonomy.contains(surface))
                throw ParseError("placement surface '" + surface + "' not in taxonomy");
            for (const auto& t : targets)
                if (!taxonomy.contains(t))
                    throw ParseError("placement target '" + t + "' not in taxonomy");
        }
    }

    // surface_category is a leaf category or kFloorCategory.
    bool allows(const Taxonomy& taxonomy, const std::string& surface_category,
                const std::string& object_category) const {
        std::vector<std::string> surface_keys;
        if (surface_category == kFloorCategory)
            surface_keys.push_back(kFloorCategory);
        else
            surface_keys = taxonomy.chain(surface_category);
        for (const auto& key : surface_keys) {
            auto it = edges_.find(key);
            if (it == edges_.end()) continue;
            for (const auto& target : it->second)
                if (taxonomy.category_entails(object_category, target)) return true;
        }
        return false;
    }

    bool surface_has_rules(const Taxonomy& taxonomy, const std::string& surface_category) const {
        if (surface_category == kFloorCategory) return edges_.count(kFloorCategory) > 0;
        for (const auto& key : taxonomy.chain(surface_category))
            if (edges_.count(key)) return true;
        return false;
    }

    const std::map<std::string, std::vector<std::string>>& edges() const { return edges_; }

private:
    std::map<std::string, std::vector<std::string>> edges_;
};

struct BoundingBox2D {
    double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
};

struct ObjectInstance {
    std::string id;
    int asset = -1;  // catalog index; -1 for hand-built test objects
    std::string category;  // leaf
    std::string color;
    std::string material;
    double x = 0, y = 0;      // footprint center on the supporting surface
    double z = 0;             // bottom elevation (top of the parent)
    double width = 0, depth = 0, height = 0;
    std::string parent_id = kFloorId;

    ObjectTraits traits() const { return ObjectTraits{color, material, category}; }
};

struct SceneGraph {
    double floor_width = 10.0, floor_depth = 10.0;
    std::vector<ObjectInstance> objects;

    int find_index(const std::string& id) const {
        for (std::size_t i = 0; i < objects.size(); ++i)
            if (objects[i].id == id) return static_cast<int>(i);
        return -1;
    }

    const ObjectInstance& at(const std::string& id) const {
        int i = find_index(id);
        if (i < 0) throw LookupError("unknown object id '" + id + "'");
        return objects[static_cast<std::size_t>(i)];
    }

    std::vector<int> children_of(const std::string& parent_id) const {
        std::vector<int> out;
        for (std::size_t i = 0; i < objects.size(); ++i)
            if (objects[i].parent_id == parent_id) out.push_back(static_cast<int>(i));
        return out;
    }

    bool has_children(const std::string& id) const {
        for (const auto& o : objects)
            if (o.parent_id == id) return true;
        return false;
    }
};

struct ScenePair {
    SceneGraph scene_q;
    SceneGraph scene_a;
    std::string target_id;       // object of scene_q replaced in scene_a
    std::string replacement_id;  // its stand-in inside scene_a
};

struct SceneConfig {
    int objects_min = 8;
    int objects_max = 15;
    int sample_points = 100;      // T
    double min_separation = 0.3;  // required clearance between siblings
    int divergence_limit = 3;     // K
    double floor_width = 10.0;
    double floor_depth = 10.0;
    int retry_budget = 50;
    double different_category_prob = 0.5;
};

// Number of objects of `scene` whose full description satisfies the set.
inline bool object_satisfies(const Taxonomy& taxonomy, const ObjectInstance& o,
                             const PropertySet& pset) {
    if (pset.is_identifier()) return o.id == *pset.identifier;
    return taxonomy.satisfies(o.traits(), pset);
}

inline int count_matching(const Taxonomy& taxonomy, const SceneGraph& scene,
                          const PropertySet& pset) {
    int n = 0;
    for (const auto& o : scene.objects)
        if (object_satisfies(taxonomy, o, pset)) ++n;
    return n;
}

inline std::vector<int> matching_indices(const Taxonomy& taxonomy, const SceneGraph& scene,
                                         const PropertySet& pset) {
    std::vector<int> out;
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        if (object_satisfies(taxonomy, scene.objects[i], pset)) out.push_back(static_cast<int>(i));
    return out;
}

// Clearance between two footprints: the larger per-axis excess beyond the
// point where the rectangles would touch. >= 0 means no overlap.
inline double footprint_gap(double ax, double ay, double aw, double ad, double bx, double by,
                            double bw, double bd) {
    double gx = std::abs(ax - bx) - (aw + bw) / 2.0;
    double gy = std::abs(ay - by) - (ad + bd) / 2.0;
    return std::max(gx, gy);
}

inline double footprint_gap(const ObjectInstance& a, const ObjectInstance& b) {
    return footprint_gap(a.x, a.y, a.width, a.depth, b.x, b.y, b.width, b.depth);
}

// Supporting area of a surface in scene coordinates.
struct SurfaceArea {
    double cx, cy;        // center
    double width, depth;  // extents
    double top;           // elevation of the supported bottom
};

inline SurfaceArea surface_area(const SceneGraph& scene, const std::string& surface_id) {
    if (surface_id == kFloorId)
        return SurfaceArea{scene.floor_width / 2.0, scene.floor_depth / 2.0, scene.floor_width,
                           scene.floor_depth, 0.0};
    const ObjectInstance& s = scene.at(surface_id);
    return SurfaceArea{s.x, s.y, s.width, s.depth, s.z + s.height};
}

// Three-step placement search: sample T points on the area, filter points
// whose footprint crosses the boundary or sits closer than `min_separation`
// to a sibling, then keep the survivor with minimum L1 distance to its
// closest sibling (uniform choice when the surface is empty).
inline std::optional<std::pair<double, double>> place_object(const SceneGraph& scene,
                                                             const std::string& surface_id,
                                                             double obj_w, double obj_d,
                                                             const SceneConfig& cfg, Rng& rng) {
    const SurfaceArea area = surface_area(scene, surface_id);
    std::vector<const ObjectInstance*> siblings;
    for (const auto& o : scene.objects)
        if (o.parent_id == surface_id) siblings.push_back(&o);

    std::vector<std::pair<double, double>> points;
    points.reserve(static_cast<std::size_t>(cfg.sample_points));
    for (int i = 0; i < cfg.sample_points; ++i) {
        double x = rng.real(area.cx - area.width / 2.0, area.cx + area.width / 2.0);
        double y = rng.real(area.cy - area.depth / 2.0, area.cy + area.depth / 2.0);
        points.emplace_back(x, y);
    }

    std::vector<std::pair<double, double>> survivors;
    for (const auto& [x, y] : points) {
        if (std::abs(x - area.cx) > (area.width - obj_w) / 2.0) continue;
        if (std::abs(y - area.cy) > (area.depth - obj_d) / 2.0) continue;
        bool ok = true;
        for (const ObjectInstance* s : siblings) {
            if (footprint_gap(x, y, obj_w, obj_d, s->x, s->y, s->width, s->depth) <
                cfg.min_separation) {
                ok = false;
                break;
            }
        }
        if (ok) survivors.emplace_back(x, y);
    }
    if (survivors.empty()) return std::nullopt;

    if (siblings.empty()) return survivors[rng.range(survivors.size())];

    std::size_t best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < survivors.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const ObjectInstance* s : siblings)
            nearest = std::min(nearest, std::abs(survivors[i].first - s->x) +
                                            std::abs(survivors[i].second - s->y));
        if (nearest < best_dist) {
            best_dist = nearest;
            best = i;
        }
    }
    return survivors[best];
}

// Degree of divergence of a category: how many of its distinct child
// categories are instantiated by at least one object (through chains).
inline int divergence(const Taxonomy& taxonomy, const SceneGraph& scene,
                      const std::string& category) {
    std::set<std::string> instantiated;
    for (const auto& o : scene.objects)
        for (const auto& c : taxonomy.chain(o.category)) instantiated.insert(c);
    int d = 0;
    for (const auto& child : taxonomy.child_names(category))
        if (instantiated.count(child)) ++d;
    return d;
}

namespace detail {

// Instantiated category set of a scene, for incremental divergence checks.
inline std::set<std::string> instantiated_categories(const Taxonomy& taxonomy,
                                                     const SceneGraph& scene,
                                                     const std::string& skip_id = "") {
    std::set<std::string> out;
    for (const auto& o : scene.objects) {
        if (!skip_id.empty() && o.id == skip_id) continue;
        for (const auto& c : taxonomy.chain(o.category)) out.insert(c);
    }
    return out;
}

// Would adding an object of `leaf` keep every category's divergence <= K?
inline bool divergence_ok(const Taxonomy& taxonomy, const std::set<std::string>& instantiated,
                          const std::string& leaf, int k) {
    for (const auto& v : taxonomy.chain(leaf)) {
        if (instantiated.count(v)) continue;  // no category gains a new child
        int parent = taxonomy.node(v).parent;
        if (parent < 0) continue;
        const Category& p = taxonomy.node(parent);
        int d = 0;
        for (int child : p.children)
            if (instantiated.count(taxonomy.node(child).name)) ++d;
        if (d + 1 > k) return false;
    }
    return true;
}

inline bool has_twin(const SceneGraph& scene, const std::string& leaf, const std::string& color,
                     const std::string& material, const std::string& skip_id = "") {
    for (const auto& o : scene.objects) {
        if (!skip_id.empty() && o.id == skip_id) continue;
        if (o.category == leaf && o.color == color && o.material == material) return true;
    }
    return false;
}

inline std::string make_object_id(const SceneGraph& scene, const std::string& leaf) {
    std::string base = leaf;
    std::replace(base.begin(), base.end(), ' ', '_');
    int ordinal = 0;
    for (const auto& o : scene.objects)
        if (o.category == leaf) ++ordinal;
    return base + std::to_string(ordinal + 1);
}

}  // namespace detail

// Builds a scene object by object: pick a surface, pick an asset the surface
// licenses that keeps every divergence within K, then run the placement
// search. Attribute triples (category, color, material) are kept unique per
// scene so that every object admits an unambiguous description.
inline SceneGraph generate_scene(const Taxonomy& taxonomy, const AssetCatalog& catalog,
                                 const PlacementGraph& placement, const SceneConfig& cfg,
                                 Rng& rng) {
    if (cfg.sample_points < 1) throw ConfigError("sample_points", "must be >= 1");
    SceneGraph scene;
    scene.floor_width = cfg.floor_width;
    scene.floor_depth = cfg.floor_depth;
    const int target =
        cfg.objects_min + static_cast<int>(rng.range(
                              static_cast<std::uint64_t>(cfg.objects_max - cfg.objects_min + 1)));

    int failures = 0;
    auto instantiated = detail::instantiated_categories(taxonomy, scene);
    while (static_cast<int>(scene.objects.size()) < target && failures < cfg.retry_budget) {
        std::vector<std::string> surfaces{kFloorId};
        for (const auto& o : scene.objects)
            if (placement.surface_has_rules(taxonomy, o.category)) surfaces.push_back(o.id);
        const std::string surface_id = surfaces[rng.range(surfaces.size())];
        const std::string surface_cat =
            surface_id == kFloorId ? kFloorCategory : scene.at(surface_id).category;
        const SurfaceArea area = surface_area(scene, surface_id);

        std::vector<int> candidates;
        for (std::size_t i = 0; i < catalog.size(); ++i) {
            const AssetSpec& a = catalog.at(static_cast<int>(i));
            if (!placement.allows(taxonomy, surface_cat, a.category)) continue;
            if (a.width > area.width || a.depth > area.depth) continue;
            if (!detail::divergence_ok(taxonomy, instantiated, a.category, cfg.divergence_limit))
                continue;
            candidates.push_back(static_cast<int>(i));
        }
        if (candidates.empty()) {
            ++failures;
            continue;
        }
        const AssetSpec& asset = catalog.at(candidates[rng.range(candidates.size())]);
        const std::string color = rng.pick(asset.colors);
        const std::string material = rng.pick(asset.materials);
        if (detail::has_twin(scene, asset.category, color, material)) {
            ++failures;
            continue;
        }
        auto pos = place_object(scene, surface_id, asset.width, asset.depth, cfg, rng);
        if (!pos) {
            ++failures;
            continue;
        }
        ObjectInstance obj;
        obj.id = detail::make_object_id(scene, asset.category);
        obj.asset = static_cast<int>(&asset - catalog.assets().data());
        obj.category = asset.category;
        obj.color = color;
        obj.material = material;
        obj.x = pos->first;
        obj.y = pos->second;
        obj.z = area.top;
        obj.width = asset.width;
        obj.depth = asset.depth;
        obj.height = asset.height;
        obj.parent_id = surface_id;
        scene.objects.push_back(obj);
        for (const auto& c : taxonomy.chain(obj.category)) instantiated.insert(c);
    }

    if (static_cast<int>(scene.objects.size()) < cfg.objects_min)
        throw GenerationError("scene generation exhausted its retry budget at " +
                              std::to_string(scene.objects.size()) + " objects");
    return scene;
}

namespace detail {

// Whether a replacement with the given footprint can occupy the target's
// spot: inside the parent area and clear of every sibling.
inline bool replacement_fits(const SceneGraph& scene, const ObjectInstance& target, double w,
                             double d, const SceneConfig& cfg) {
    const SurfaceArea area = surface_area(scene, target.parent_id);
    if (std::abs(target.x - area.cx) > (area.width - w) / 2.0) return false;
    if (std::abs(target.y - area.cy) > (area.depth - d) / 2.0) return false;
    for (const auto& o : scene.objects) {
        if (o.id == target.id || o.parent_id != target.parent_id) continue;
        if (footprint_gap(target.x, target.y, w, d, o.x, o.y, o.width, o.depth) <
            cfg.min_separation)
            return false;
    }
    return true;
}

inline std::string make_replacement_id(const SceneGraph& scene_q, const std::string& leaf) {
    std::string base = leaf;
    std::replace(base.begin(), base.end(), ' ', '_');
    int ordinal = 0;
    for (const auto& o : scene_q.objects)
        if (o.category == leaf) ++ordinal;
    // scene_a is scene_q minus the target plus the replacement, so counting
    // scene_q objects and adding one can never collide in either scene.
    return base + std::to_string(ordinal + 1);
}

}  // namespace detail

// Replaces one childless object with either a different-category asset or a
// same-category asset with different attributes, at the same spot on the
// same parent.
inline ScenePair inject_difference(const Taxonomy& taxonomy, const AssetCatalog& catalog,
                                   const PlacementGraph& placement, const SceneGraph& scene,
                                   const SceneConfig& cfg, Rng& rng) {
    std::vector<int> replaceable;
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        if (!scene.has_children(scene.objects[i].id)) replaceable.push_back(static_cast<int>(i));
    if (replaceable.empty()) throw GenerationError("no replaceable object in scene");

    for (int attempt = 0; attempt < cfg.retry_budget; ++attempt) {
        const ObjectInstance& target =
            scene.objects[static_cast<std::size_t>(replaceable[rng.range(replaceable.size())])];
        const bool different_category = rng.coin(cfg.different_category_prob);
        const std::string parent_cat =
            target.parent_id == kFloorId ? kFloorCategory : scene.at(target.parent_id).category;
        const auto instantiated =
            detail::instantiated_categories(taxonomy, scene, target.id);

        // (asset index, color, material) triples, enumerated in stable order.
        std::vector<std::tuple<int, std::string, std::string>> candidates;
        for (std::size_t ai = 0; ai < catalog.size(); ++ai) {
            const AssetSpec& a = catalog.at(static_cast<int>(ai));
            if (different_category) {
                if (a.category == target.category) continue;
                if (!placement.allows(taxonomy, parent_cat, a.category)) continue;
                if (!detail::divergence_ok(taxonomy, instantiated, a.category,
                                           cfg.divergence_limit))
                    continue;
            } else {
                if (a.category != target.category) continue;
            }
            if (!detail::replacement_fits(scene, target, a.width, a.depth, cfg)) continue;
            for (const auto& c : a.colors)
                for (const auto& m : a.materials) {
                    if (!different_category && c == target.color && m == target.material) continue;
                    if (detail::has_twin(scene, a.category, c, m, target.id)) continue;
                    candidates.emplace_back(static_cast<int>(ai), c, m);
                }
        }
        if (candidates.empty()) continue;
        const auto& [asset_index, color, material] = candidates[rng.range(candidates.size())];
        const AssetSpec& asset = catalog.at(asset_index);

        ScenePair pair;
        pair.scene_q = scene;
        pair.scene_a = scene;
        pair.target_id = target.id;
        ObjectInstance repl;
        repl.id = detail::make_replacement_id(scene, asset.category);
        repl.asset = asset_index;
        repl.category = asset.category;
        repl.color = color;
        repl.material = material;
        repl.x = target.x;
        repl.y = target.y;
        repl.z = target.z;
        repl.width = asset.width;
        repl.depth = asset.depth;
        repl.height = asset.height;
        repl.parent_id = target.parent_id;
        pair.replacement_id = repl.id;
        int ti = pair.scene_a.find_index(target.id);
        pair.scene_a.objects[static_cast<std::size_t>(ti)] = repl;
        return pair;
    }
    throw GenerationError("difference injection exhausted its retry budget");
}

// Deterministic fixed-camera oblique projection. Horizontal position depends
// on x only; the vertical coordinate blends y with elevation.
inline constexpr double kElevationBlend = 0.3;
inline constexpr double kHeightBudget = 5.0;

inline BoundingBox2D project_bbox2d(const SceneGraph& scene, const ObjectInstance& o) {
    const double vspan = scene.floor_depth + kElevationBlend * kHeightBudget;
    BoundingBox2D b;
    b.x_min = (o.x - o.width / 2.0) / scene.floor_width;
    b.x_max = (o.x + o.width / 2.0) / scene.floor_width;
    b.y_min = (o.y - o.depth / 2.0 + kElevationBlend * o.z) / vspan;
    b.y_max = (o.y + o.depth / 2.0 + kElevationBlend * (o.z + o.height)) / vspan;
    b.x_min = std::clamp(b.x_min, 0.0, 1.0);
    b.x_max = std::clamp(b.x_max, 0.0, 1.0);
    b.y_min = std::clamp(b.y_min, 0.0, 1.0);
    b.y_max = std::clamp(b.y_max, 0.0, 1.0);
    return b;
}

// --- invariant checks (used by tests and the validate command) -------------

inline std::vector<std::string> validate_scene(const Taxonomy& taxonomy,
                                               const PlacementGraph& placement,
                                               const SceneConfig& cfg, const SceneGraph& scene) {
    std::vector<std::string> violations;
    std::set<std::string> ids;
    for (const auto& o : scene.objects) {
        if (!ids.insert(o.id).second) violations.push_back("duplicate id " + o.id);
        if (!taxonomy.contains(o.category))
            violations.push_back(o.id + ": unknown category " + o.category);
        const std::string parent_cat =
            o.parent_id == kFloorId ? kFloorCategory
                                    : scene.at(o.parent_id).category;
        if (!placement.allows(taxonomy, parent_cat, o.category))
            violations.push_back(o.id + ": placement " + o.category + " on " + parent_cat +
                                 " not licensed");
        const SurfaceArea area = surface_area(scene, o.parent_id);
        if (std::abs(o.x - area.cx) > (area.width - o.width) / 2.0 + 1e-9 ||
            std::abs(o.y - area.cy) > (area.depth - o.depth) / 2.0 + 1e-9)
            violations.push_back(o.id + ": footprint outside parent area");
    }
    // Parent links form a forest rooted at the floor.
    for (const auto& o : scene.objects) {
        std::string cur = o.parent_id;
        std::size_t hops = 0;
        while (cur != kFloorId) {
            if (scene.find_index(cur) < 0) {
                violations.push_back(o.id + ": dangling parent " + cur);
                break;
            }
            if (++hops > scene.objects.size()) {
                violations.push_back(o.id + ": parent cycle");
                break;
            }
            cur = scene.at(cur).parent_id;
        }
    }
    for (std::size_t i = 0; i < scene.objects.size(); ++i)
        for (std::size_t j = i + 1; j < scene.objects.size(); ++j) {
            const auto& a = scene.objects[i];
            const auto& b = scene.objects[j];
            if (a.parent_id != b.parent_id) continue;
            if (footprint_gap(a, b) < cfg.min_separation - 1e-9)
                violations.push_back(a.id + "/" + b.id + ": sibling separation below minimum");
        }
    for (const auto& node : taxonomy.nodes())
        if (divergence(taxonomy, scene, node.name) > cfg.divergence_limit)
            violations.push_back("divergence of " + node.name + " exceeds limit");
    return violations;
}

inline std::vector<std::string> validate_pair(const Taxonomy& taxonomy,
                                              const PlacementGraph& placement,
                                              const SceneConfig& cfg, const ScenePair& pair) {
    std::vector<std::string> violations = validate_scene(taxonomy, placement, cfg, pair.scene_q);
    auto more = validate_scene(taxonomy, placement, cfg, pair.scene_a);
    violations.insert(violations.end(), more.begin(), more.end());

    if (pair.scene_q.objects.size() != pair.scene_a.objects.size())
        violations.push_back("pair: object counts differ");
    int ti = pair.scene_q.find_index(pair.target_id);
    int ri = pair.scene_a.find_index(pair.replacement_id);
    if (ti < 0 || ri < 0) {
        violations.push_back("pair: target or replacement id missing");
        return violations;
    }
    const auto& t = pair.scene_q.objects[static_cast<std::size_t>(ti)];
    const auto& r = pair.scene_a.objects[static_cast<std::size_t>(ri)];
    if (pair.scene_a.find_index(pair.target_id) >= 0)
        violations.push_back("pair: target still present in scene_a");
    if (pair.scene_q.find_index(pair.replacement_id) >= 0)
        violations.push_back("pair: replacement present in scene_q");
    if (t.parent_id != r.parent_id || t.x != r.x || t.y != r.y)
        violations.push_back("pair: replacement moved");
    const bool category_differs = t.category != r.category;
    const bool attrs_differ = t.color != r.color || t.material != r.material;
    if (!category_differs && !attrs_differ)
        violations.push_back("pair: target and replacement identical");
    // Everything else must match exactly.
    std::size_t diffs = 0;
    for (const auto& o : pair.scene_q.objects) {
        if (o.id == pair.target_id) continue;
        int idx = pair.scene_a.find_index(o.id);
        if (idx < 0) {
            violations.push_back("pair: object " + o.id + " missing from scene_a");
            continue;
        }
        const auto& other = pair.scene_a.objects[static_cast<std::size_t>(idx)];
        if (other.category != o.category || other.color != o.color ||
            other.material != o.material || other.x != o.x || other.y != o.y ||
            other.parent_id != o.parent_id)
            ++diffs;
    }
    if (diffs > 0) violations.push_back("pair: shared objects differ");
    return violations;
}

}  // namespace spotdiff
