#pragma once

#include <algorithm>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "spotdiff/errors.hpp"

namespace spotdiff {

enum class PropertyKind { Color, Material, Category };

inline const char* to_string(PropertyKind k) {
    switch (k) {
        case PropertyKind::Color: return "color";
        case PropertyKind::Material: return "material";
        case PropertyKind::Category: return "category";
    }
    return "?";
}

struct AtomicProperty {
    PropertyKind kind;
    std::string value;
    friend bool operator==(const AtomicProperty& a, const AtomicProperty& b) {
        return a.kind == b.kind && a.value == b.value;
    }
};

// Closed attribute vocabularies. Kept small so answer statistics stay
// comparable across generated datasets.
inline const std::vector<std::string>& color_vocabulary() {
    static const std::vector<std::string> v = {"white", "black", "brown", "gray",
                                               "red",   "green", "blue",  "yellow"};
    return v;
}

inline const std::vector<std::string>& material_vocabulary() {
    static const std::vector<std::string> v = {"wooden",  "metal",  "plastic", "glass",
                                               "ceramic", "fabric", "leather", "rubber"};
    return v;
}

// A combination of atomic properties (at most one color, one material, one
// category) or an identifier naming a concrete object. The unit of
// questioning and of state tracking.
struct PropertySet {
    std::optional<std::string> identifier;
    std::optional<std::string> color;
    std::optional<std::string> material;
    std::optional<std::string> category;

    static PropertySet of_identifier(std::string id) {
        PropertySet p;
        p.identifier = std::move(id);
        return p;
    }
    static PropertySet of(std::optional<std::string> color, std::optional<std::string> material,
                          std::optional<std::string> category) {
        PropertySet p;
        p.color = std::move(color);
        p.material = std::move(material);
        p.category = std::move(category);
        return p;
    }
    static PropertySet of_color(std::string c) { return of(std::move(c), {}, {}); }
    static PropertySet of_material(std::string m) { return of({}, std::move(m), {}); }
    static PropertySet of_category(std::string c) { return of({}, {}, std::move(c)); }

    bool is_identifier() const { return identifier.has_value(); }
    bool empty() const { return !identifier && !color && !material && !category; }

    // Number of atomic properties; identifier sets report 0.
    int cardinality() const {
        return (color ? 1 : 0) + (material ? 1 : 0) + (category ? 1 : 0);
    }

    // Canonical ordering: identifier, then (color, material, category).
    auto key() const { return std::tie(identifier, color, material, category); }
    friend bool operator==(const PropertySet& a, const PropertySet& b) { return a.key() == b.key(); }
    friend bool operator!=(const PropertySet& a, const PropertySet& b) { return !(a == b); }
    friend bool operator<(const PropertySet& a, const PropertySet& b) { return a.key() < b.key(); }

    std::string to_string() const {
        if (identifier) return "{" + *identifier + "}";
        std::string s = "{";
        bool first = true;
        for (const auto* f : {&color, &material, &category}) {
            if (!f->has_value()) continue;
            if (!first) s += ", ";
            s += **f;
            first = false;
        }
        return s + "}";
    }
};

// The attribute triple of a fully specified object; enough context to decide
// which property sets the object satisfies.
struct ObjectTraits {
    std::string color;
    std::string material;
    std::string category;  // leaf
};

struct Category {
    std::string name;
    int parent = -1;
    std::vector<int> children;
};

// The category forest. Immutable after load; shared freely across workers.
class Taxonomy {
public:
    static Taxonomy parse(std::istream& in) {
        Taxonomy t;
        std::string line;
        int lineno = 0;
        std::vector<std::pair<std::string, std::string>> rows;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            if (s.empty()) continue;
            auto sep = s.find(':');
            if (sep == std::string::npos)
                throw ParseError("taxonomy line " + std::to_string(lineno) + ": missing ':'");
            std::string name = trim(s.substr(0, sep));
            std::string parent = trim(s.substr(sep + 1));
            if (name.empty())
                throw ParseError("taxonomy line " + std::to_string(lineno) + ": empty name");
            rows.emplace_back(name, parent);
        }
        for (const auto& [name, parent] : rows) {
            if (t.index_.count(name)) throw ParseError("duplicate category '" + name + "'");
            t.index_[name] = static_cast<int>(t.nodes_.size());
            t.nodes_.push_back(Category{name, -1, {}});
        }
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const std::string& parent = rows[i].second;
            if (parent == "-" || parent.empty()) continue;
            auto it = t.index_.find(parent);
            if (it == t.index_.end())
                throw ParseError("category '" + rows[i].first + "' has unknown parent '" + parent + "'");
            t.nodes_[i].parent = it->second;
            t.nodes_[it->second].children.push_back(static_cast<int>(i));
        }
        t.check_forest();
        return t;
    }

    static Taxonomy parse_string(const std::string& text) {
        std::istringstream in(text);
        return parse(in);
    }

    bool contains(const std::string& name) const { return index_.count(name) > 0; }

    int id(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw LookupError("unknown category '" + name + "'");
        return it->second;
    }

    const Category& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
    const Category& node(const std::string& name) const { return node(id(name)); }
    std::size_t size() const { return nodes_.size(); }

    const std::vector<Category>& nodes() const { return nodes_; }

    bool is_leaf(const std::string& name) const { return node(name).children.empty(); }

    // Strict ancestor chain, immediate parent first.
    std::vector<std::string> ancestors(const std::string& name) const {
        std::vector<std::string> out;
        int cur = node(name).parent;
        while (cur >= 0) {
            out.push_back(nodes_[static_cast<std::size_t>(cur)].name);
            cur = nodes_[static_cast<std::size_t>(cur)].parent;
        }
        return out;
    }

    // The full category set of an object of this category: itself + ancestors.
    std::vector<std::string> chain(const std::string& name) const {
        std::vector<std::string> out{name};
        auto anc = ancestors(name);
        out.insert(out.end(), anc.begin(), anc.end());
        return out;
    }

    std::vector<std::string> child_names(const std::string& name) const {
        std::vector<std::string> out;
        for (int c : node(name).children) out.push_back(nodes_[static_cast<std::size_t>(c)].name);
        return out;
    }

    // specific == general, or general is an ancestor of specific.
    bool category_entails(const std::string& specific, const std::string& general) const {
        if (specific == general) return contains(specific);
        int cur = node(specific).parent;
        int g = id(general);
        while (cur >= 0) {
            if (cur == g) return true;
            cur = nodes_[static_cast<std::size_t>(cur)].parent;
        }
        return false;
    }

    // Entailment between non-identifier property sets: every atom of
    // `general` is matched by `specific` (attributes exactly, the category up
    // the chain). Identifier sets entail only themselves here; use
    // `satisfies` when the object's traits are known.
    bool entails(const PropertySet& specific, const PropertySet& general) const {
        if (specific.is_identifier() || general.is_identifier()) return specific == general;
        if (general.color && specific.color != general.color) return false;
        if (general.material && specific.material != general.material) return false;
        if (general.category) {
            if (!specific.category) return false;
            if (!category_entails(*specific.category, *general.category)) return false;
        }
        return true;
    }

    // Whether a fully attributed object satisfies a non-identifier set.
    bool satisfies(const ObjectTraits& traits, const PropertySet& pset) const {
        if (pset.is_identifier()) return false;
        if (pset.color && traits.color != *pset.color) return false;
        if (pset.material && traits.material != *pset.material) return false;
        if (pset.category && !category_entails(traits.category, *pset.category)) return false;
        return true;
    }

    // The identifier set plus every non-empty combination of
    // {color?, material?, one category from the chain?}. Sorted canonically.
    std::vector<PropertySet> enumerate_property_sets(const ObjectTraits& traits,
                                                     const std::string& object_id) const {
        std::vector<PropertySet> out;
        out.push_back(PropertySet::of_identifier(object_id));
        const auto cats = chain(traits.category);
        const std::optional<std::string> colors[] = {std::nullopt, traits.color};
        const std::optional<std::string> materials[] = {std::nullopt, traits.material};
        for (const auto& c : colors)
            for (const auto& m : materials) {
                if (c || m) out.push_back(PropertySet::of(c, m, std::nullopt));
                for (const auto& cat : cats) out.push_back(PropertySet::of(c, m, cat));
            }
        std::sort(out.begin(), out.end());
        return out;
    }

    // Union of two non-identifier sets from one object's lattice: attributes
    // merge, the deeper category wins.
    PropertySet union_sets(const PropertySet& a, const PropertySet& b) const {
        PropertySet u;
        u.color = a.color ? a.color : b.color;
        u.material = a.material ? a.material : b.material;
        if (a.category && b.category)
            u.category = category_entails(*a.category, *b.category) ? a.category : b.category;
        else
            u.category = a.category ? a.category : b.category;
        return u;
    }

    static std::string trim(const std::string& s) {
        std::size_t b = s.find_first_not_of(" \t\r\n");
        if (b == std::string::npos) return "";
        std::size_t e = s.find_last_not_of(" \t\r\n");
        return s.substr(b, e - b + 1);
    }

    static std::string strip_comment(const std::string& s) {
        auto pos = s.find('#');
        return trim(pos == std::string::npos ? s : s.substr(0, pos));
    }

private:
    void check_forest() const {
        // Parent links were built from a name table, so cycles are the only
        // structural hazard left.
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            int cur = nodes_[i].parent;
            std::size_t hops = 0;
            while (cur >= 0) {
                if (++hops > nodes_.size()) throw ParseError("taxonomy contains a cycle");
                cur = nodes_[static_cast<std::size_t>(cur)].parent;
            }
        }
    }

    std::vector<Category> nodes_;
    std::map<std::string, int> index_;
};

// One digital asset: a leaf category with its admissible attribute values and
// base dimensions in scene units.
struct AssetSpec {
    std::string category;
    std::vector<std::string> colors;
    std::vector<std::string> materials;
    double width = 0, depth = 0, height = 0;
};

class AssetCatalog {
public:
    static AssetCatalog parse(std::istream& in) {
        AssetCatalog cat;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = Taxonomy::strip_comment(line);
            if (s.empty()) continue;
            cat.assets_.push_back(parse_line(s, lineno));
        }
        for (std::size_t i = 0; i < cat.assets_.size(); ++i)
            cat.by_category_[cat.assets_[i].category].push_back(static_cast<int>(i));
        return cat;
    }

    void validate(const Taxonomy& taxonomy) const {
        for (const auto& a : assets_) {
            if (!taxonomy.contains(a.category))
                throw ParseError("asset category '" + a.category + "' not in taxonomy");
            if (!taxonomy.is_leaf(a.category))
                throw ParseError("asset category '" + a.category + "' is not a leaf");
            if (a.colors.empty() || a.materials.empty())
                throw ParseError("asset '" + a.category + "' has empty attribute list");
            for (const auto& c : a.colors)
                if (!contains(color_vocabulary(), c))
                    throw ParseError("asset '" + a.category + "': unknown color '" + c + "'");
            for (const auto& m : a.materials)
                if (!contains(material_vocabulary(), m))
                    throw ParseError("asset '" + a.category + "': unknown material '" + m + "'");
            if (a.width <= 0 || a.depth <= 0 || a.height <= 0)
                throw ParseError("asset '" + a.category + "': non-positive size");
        }
    }

    const std::vector<AssetSpec>& assets() const { return assets_; }
    const AssetSpec& at(int i) const { return assets_[static_cast<std::size_t>(i)]; }
    std::size_t size() const { return assets_.size(); }

    std::vector<int> of_category(const std::string& leaf) const {
        auto it = by_category_.find(leaf);
        if (it == by_category_.end()) return {};
        return it->second;
    }

    // Leaf categories that have at least one asset, sorted.
    std::vector<std::string> categories() const {
        std::vector<std::string> out;
        for (const auto& [k, v] : by_category_) out.push_back(k);
        return out;
    }

private:
    static bool contains(const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    }

    static std::vector<std::string> split_list(const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        std::istringstream in(s);
        while (std::getline(in, cur, ',')) {
            cur = Taxonomy::trim(cur);
            if (!cur.empty()) out.push_back(cur);
        }
        return out;
    }

    static AssetSpec parse_line(const std::string& s, int lineno) {
        // <category> : colors=<a,b> ; materials=<a,b> ; size=<w> <d> <h>
        auto sep = s.find(':');
        if (sep == std::string::npos)
            throw ParseError("catalog line " + std::to_string(lineno) + ": missing ':'");
        AssetSpec spec;
        spec.category = Taxonomy::trim(s.substr(0, sep));
        std::string rest = s.substr(sep + 1);
        std::istringstream fields(rest);
        std::string field;
        bool have_size = false;
        while (std::getline(fields, field, ';')) {
            field = Taxonomy::trim(field);
            auto eq = field.find('=');
            if (eq == std::string::npos)
                throw ParseError("catalog line " + std::to_string(lineno) + ": bad field '" + field + "'");
            std::string key = Taxonomy::trim(field.substr(0, eq));
            std::string value = Taxonomy::trim(field.substr(eq + 1));
            if (key == "colors") {
                spec.colors = split_list(value);
            } else if (key == "materials") {
                spec.materials = split_list(value);
            } else if (key == "size") {
                std::istringstream sz(value);
                if (!(sz >> spec.width >> spec.depth >> spec.height))
                    throw ParseError("catalog line " + std::to_string(lineno) + ": bad size '" + value + "'");
                have_size = true;
            } else {
                throw ParseError("catalog line " + std::to_string(lineno) + ": unknown key '" + key + "'");
            }
        }
        if (!have_size)
            throw ParseError("catalog line " + std::to_string(lineno) + ": missing size");
        return spec;
    }

    std::vector<AssetSpec> assets_;
    std::map<std::string, std::vector<int>> by_category_;
};

}  // namespace spotdiff
