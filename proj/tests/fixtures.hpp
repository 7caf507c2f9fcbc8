#pragma once

// Synthetic fixtures shared by the unit suites and the acceptance runner.

#include <cstdint>
#include <string>
#include <vector>

#include "lpg/dataset.hpp"
#include "lpg/graph.hpp"
#include "lpg/rng.hpp"

namespace fixtures {

// Gaussian blobs: n_classes clusters in dimension d, centers on distinct
// scaled axes so both euclidean and cosine geometry separate them.
inline lpg::LabeledDataset make_blobs(std::size_t n_classes,
                                      std::size_t per_class, std::size_t d,
                                      std::uint64_t seed,
                                      double center_scale = 6.0,
                                      double noise = 1.0) {
  lpg::Rng rng(seed);
  lpg::LabeledDataset dataset;
  for (std::size_t c = 0; c < n_classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      std::vector<double> x(d);
      for (double& v : x) v = rng.gaussian() * noise;
      x[c % d] += center_scale;
      dataset.features.push_back(lpg::EmbeddingVector{std::move(x)});
      dataset.labels.push_back("blob" + std::to_string(c));
      dataset.example_ids.push_back("b" + std::to_string(c) + "_" +
                                    std::to_string(i));
    }
  }
  return dataset;
}

// Players-and-countries graph: n_countries Country nodes, n_players Player
// nodes whose `desc` embeds their country's name token, and one REPRESENTS
// edge per player. Mirrors a world-cup style roster graph.
inline lpg::PropertyGraph players_countries_graph(std::size_t n_countries,
                                                  std::size_t n_players) {
  lpg::PropertyGraph g;
  std::vector<std::string> country_names;
  for (std::size_t c = 0; c < n_countries; ++c) {
    const std::string name = "Country" + std::to_string(c);
    country_names.push_back(name);
    lpg::Node node;
    node.id = "c" + std::to_string(c);
    node.labels = {"Country"};
    node.properties["name"] = name;
    g.add_node(std::move(node));
  }
  for (std::size_t p = 0; p < n_players; ++p) {
    const std::size_t c = p % n_countries;
    const std::string player_id = "p" + std::to_string(p);
    lpg::Node node;
    node.id = player_id;
    node.labels = {"Player"};
    node.properties["name"] = "Player " + std::to_string(p);
    node.properties["desc"] =
        "Midfielder playing for " + country_names[c] + " since 201" +
        std::to_string(p % 10);
    g.add_node(std::move(node));
    lpg::Edge edge;
    edge.id = "rep" + std::to_string(p);
    edge.src = player_id;
    edge.dst = "c" + std::to_string(c);
    edge.rel_type = "REPRESENTS";
    g.add_edge(std::move(edge));
  }
  return g;
}

// Two-class node-classification graph: per node a `role` target property
// plus a `desc` whose wording carries the class token.
inline lpg::PropertyGraph two_role_graph(std::size_t per_class) {
  lpg::PropertyGraph g;
  for (std::size_t i = 0; i < per_class * 2; ++i) {
    const bool keeper = i % 2 == 0;
    lpg::Node node;
    node.id = "n" + std::to_string(i);
    node.labels = {"Player"};
    node.properties["name"] = "Player " + std::to_string(i);
    node.properties["role"] = std::string(keeper ? "keeper" : "forward");
    node.properties["desc"] =
        keeper ? "Guards the goal line and organizes the defense, squad #" +
                     std::to_string(i)
               : "Leads the attack and presses high up the pitch, squad #" +
                     std::to_string(i);
    g.add_node(std::move(node));
  }
  return g;
}

}  // namespace fixtures
