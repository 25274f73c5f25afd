#pragma once

// Shared fixtures for the test binaries: the data-dir world and a terse
// hand-built scene builder.

#include <string>

#include "spotdiff/world.hpp"

namespace spotdiff::testing {

inline const World& world() {
    static World w = load_world();
    return w;
}

struct SceneBuilder {
    SceneGraph scene;

    SceneBuilder(double w = 10, double d = 10) {
        scene.floor_width = w;
        scene.floor_depth = d;
    }

    SceneBuilder& add(const std::string& id, const std::string& category,
                      const std::string& color, const std::string& material, double x, double y,
                      double w = 0.3, double d = 0.3, double h = 0.3,
                      const std::string& parent = kFloorId) {
        ObjectInstance o;
        o.id = id;
        o.category = category;
        o.color = color;
        o.material = material;
        o.x = x;
        o.y = y;
        o.width = w;
        o.depth = d;
        o.height = h;
        o.parent_id = parent;
        if (parent != kFloorId) {
            const auto& p = scene.at(parent);
            o.z = p.z + p.height;
        }
        scene.objects.push_back(o);
        return *this;
    }
};

// The running example pair: four white objects; three decorations on the tea
// table of which the frame (present only on the questioner side) is the
// difference, replaced by a green vase on the answerer side.
inline SceneGraph example_scene_q() {
    SceneBuilder b;
    b.add("tea_table1", "tea table", "brown", "wooden", 5, 5, 1.2, 0.6, 0.45);
    b.add("plate1", "decorative plate", "white", "ceramic", 4.7, 5, 0.2, 0.05, 0.2, "tea_table1");
    b.add("plate2", "decorative plate", "white", "glass", 5.3, 5, 0.2, 0.05, 0.2, "tea_table1");
    b.add("frame1", "frame", "white", "wooden", 5.0, 5.2, 0.22, 0.04, 0.28, "tea_table1");
    b.add("nightstand1", "nightstand", "white", "wooden", 2, 2, 0.5, 0.4, 0.55);
    b.add("chair1", "chair", "brown", "wooden", 8, 3, 0.45, 0.45, 0.9);
    return b.scene;
}

inline SceneGraph example_scene_a() {
    SceneBuilder b;
    b.add("tea_table1", "tea table", "brown", "wooden", 5, 5, 1.2, 0.6, 0.45);
    b.add("plate1", "decorative plate", "white", "ceramic", 4.7, 5, 0.2, 0.05, 0.2, "tea_table1");
    b.add("plate2", "decorative plate", "white", "glass", 5.3, 5, 0.2, 0.05, 0.2, "tea_table1");
    b.add("vase1", "vase", "green", "ceramic", 5.0, 5.2, 0.14, 0.14, 0.3, "tea_table1");
    b.add("nightstand1", "nightstand", "white", "wooden", 2, 2, 0.5, 0.4, 0.55);
    b.add("chair1", "chair", "brown", "wooden", 8, 3, 0.45, 0.45, 0.9);
    return b.scene;
}

inline ScenePair example_pair() {
    ScenePair pair;
    pair.scene_q = example_scene_q();
    pair.scene_a = example_scene_a();
    pair.target_id = "frame1";
    pair.replacement_id = "vase1";
    return pair;
}

}  // namespace spotdiff::testing
