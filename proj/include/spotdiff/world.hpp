#pragma once

#include <fstream>
#include <string>

#include "spotdiff/errors.hpp"
#include "spotdiff/nlg.hpp"
#include "spotdiff/scene.hpp"
#include "spotdiff/taxonomy.hpp"

namespace spotdiff {

#ifndef SPOTDIFF_DATA_DIR
#define SPOTDIFF_DATA_DIR "data"
#endif

inline std::string default_data_dir() { return SPOTDIFF_DATA_DIR; }

// The immutable context every component works against: taxonomy, asset
// catalog, placement rules, templates and phrases. Loaded once, then shared
// read-only across workers.
struct World {
    Taxonomy taxonomy;
    AssetCatalog catalog;
    PlacementGraph placement;
    TemplateCatalog templates;
    PhraseCatalog phrases;
};

namespace detail {

inline std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open data file: " + path);
    return in;
}

}  // namespace detail

inline World load_world(const std::string& data_dir = default_data_dir()) {
    World w;
    {
        auto in = detail::open_or_throw(data_dir + "/taxonomy.txt");
        w.taxonomy = Taxonomy::parse(in);
    }
    {
        auto in = detail::open_or_throw(data_dir + "/catalog.txt");
        w.catalog = AssetCatalog::parse(in);
        w.catalog.validate(w.taxonomy);
    }
    {
        auto in = detail::open_or_throw(data_dir + "/placement.txt");
        w.placement = PlacementGraph::parse(in);
        w.placement.validate(w.taxonomy);
    }
    {
        auto in = detail::open_or_throw(data_dir + "/templates.txt");
        w.templates = TemplateCatalog::parse(in);
    }
    w.phrases = PhraseCatalog(&w.taxonomy);
    return w;
}

}  // namespace spotdiff
