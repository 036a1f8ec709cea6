#include <algorithm>
#include <set>

#include "navth/error.hpp"
#include "navth/scene.hpp"

namespace navth {
namespace {

constexpr double kDoorWidth = 1.0;

// Vertical wall at x spanning [y0, y1] with door gaps centred at `doors`.
void vwall(std::vector<Wall>& out, double x, double y0, double y1,
           std::initializer_list<double> doors = {}) {
  double y = y0;
  std::vector<double> d(doors);
  std::sort(d.begin(), d.end());
  for (double c : d) {
    const double lo = c - 0.5 * kDoorWidth;
    if (lo > y) out.push_back({{x, y}, {x, lo}, kDefaultWallThickness});
    y = c + 0.5 * kDoorWidth;
  }
  if (y < y1) out.push_back({{x, y}, {x, y1}, kDefaultWallThickness});
}

void hwall(std::vector<Wall>& out, double y, double x0, double x1,
           std::initializer_list<double> doors = {}) {
  double x = x0;
  std::vector<double> d(doors);
  std::sort(d.begin(), d.end());
  for (double c : d) {
    const double lo = c - 0.5 * kDoorWidth;
    if (lo > x) out.push_back({{x, y}, {lo, y}, kDefaultWallThickness});
    x = c + 0.5 * kDoorWidth;
  }
  if (x < x1) out.push_back({{x, y}, {x1, y}, kDefaultWallThickness});
}

std::vector<WallLayout> build_layouts() {
  std::vector<WallLayout> ls;
  auto add = [&](const char* id, auto&& fill) {
    WallLayout l{id, {}};
    fill(l.walls);
    ls.push_back(std::move(l));
  };
  constexpr double D = kDefaultDepth;
  constexpr double W = kDefaultWidth;

  // train / val
  add("L01", [&](auto& w) { vwall(w, 3.0, 0, D, {1.0}); vwall(w, 6.0, 0, D, {2.9}); });
  add("L02", [&](auto& w) { vwall(w, 4.4, 0, D, {1.95}); });
  add("L03", [&](auto& w) { vwall(w, 2.6, 0, D, {2.8}); vwall(w, 5.8, 0, D, {1.0}); });
  add("L04", [&](auto& w) { vwall(w, 3.4, 0, D, {1.0}); hwall(w, 2.0, 3.4, W, {6.0}); });
  add("L05", [&](auto& w) { hwall(w, 1.95, 0, 5.0, {2.5}); vwall(w, 5.0, 0, D, {3.0}); });
  add("L06", [&](auto& w) {
    vwall(w, 2.2, 0, D, {0.9});
    vwall(w, 4.4, 0, D, {3.0});
    vwall(w, 6.6, 0, D, {0.9});
  });
  add("L07", [&](auto& w) { vwall(w, 5.6, 0, D, {1.95}); hwall(w, 2.4, 0, 2.8, {1.4}); });
  add("L08", [&](auto& w) { vwall(w, 3.0, 0, 2.6); vwall(w, 6.0, 1.3, D); });
  add("L09", [&](auto& w) { vwall(w, 4.0, 0, D, {3.0}); hwall(w, 1.6, 4.0, W, {7.5}); });
  add("L10", [&](auto& w) {
    vwall(w, 2.8, 0, D, {3.0});
    vwall(w, 6.2, 0, D, {3.0});
    hwall(w, 2.2, 2.8, 6.2, {4.5});
  });
  add("L11", [&](auto& w) {
    vwall(w, 1.8, 0, D, {2.9});
    vwall(w, 5.0, 0, D, {1.0});
    vwall(w, 7.0, 0, D, {2.9});
  });
  add("L12", [&](auto& w) { hwall(w, 2.6, 0, W, {1.5, 7.0}); vwall(w, 4.4, 0, 2.6, {1.3}); });
  add("L13", [&](auto& w) { vwall(w, 3.6, 0, D, {2.8}); hwall(w, 1.8, 0, 3.6, {1.0}); });
  add("L14", [&](auto& w) { vwall(w, 2.4, 1.2, D); vwall(w, 5.2, 0, 2.7); vwall(w, 7.2, 0, D, {1.8}); });
  add("L15", [&](auto& w) {
    vwall(w, 4.8, 0, D, {0.9});
    hwall(w, 2.0, 0, 4.8, {3.6});
    hwall(w, 2.0, 4.8, W, {6.0});
  });

  // test-dev
  add("D01", [&](auto& w) {
    vwall(w, 3.2, 0, D, {2.9});
    vwall(w, 5.6, 0, D, {1.0});
    hwall(w, 2.4, 5.6, W, {7.2});
  });
  add("D02", [&](auto& w) { hwall(w, 1.9, 0, 6.4, {1.2, 4.8}); vwall(w, 6.4, 0, D, {2.9}); });

  // test-standard
  add("S01", [&](auto& w) {
    vwall(w, 2.0, 0, D, {1.0});
    vwall(w, 4.0, 0, D, {2.9});
    vwall(w, 6.4, 0, D, {1.0});
  });
  add("S02", [&](auto& w) { vwall(w, 4.4, 0, 2.9, {1.2}); hwall(w, 1.6, 4.4, W, {6.6}); });
  add("S03", [&](auto& w) {
    vwall(w, 2.9, 0, D, {2.9});
    vwall(w, 5.9, 0, D, {2.9});
    hwall(w, 2.0, 5.9, W, {7.3});
  });
  add("S04", [&](auto& w) { hwall(w, 2.2, 0, W, {2.0, 6.8}); vwall(w, 4.4, 0, 2.2); });
  add("S05", [&](auto& w) {
    vwall(w, 3.8, 0, D, {0.9});
    vwall(w, 6.3, 0, D, {3.0});
    hwall(w, 2.3, 0, 3.8, {1.9});
  });
  return ls;
}

AssetCatalog build_default_catalog() {
  AssetCatalog c;
  c.layouts = build_layouts();
  for (const auto& l : c.layouts) {
    switch (l.id[0]) {
      case 'L': c.splits.train_val.push_back(l.id); break;
      case 'D': c.splits.test_dev.push_back(l.id); break;
      default: c.splits.test_standard.push_back(l.id); break;
    }
  }
  c.furniture_categories = {
      {"TVStand", 1.0, 1.6, 0.35, 0.5},    {"DiningTable", 1.0, 1.6, 0.7, 1.0},
      {"CoffeeTable", 0.8, 1.2, 0.4, 0.6}, {"SideTable", 0.4, 0.6, 0.4, 0.6},
      {"Desk", 1.0, 1.4, 0.5, 0.7},        {"Sofa", 1.6, 2.2, 0.8, 0.95},
      {"ArmChair", 0.7, 0.9, 0.7, 0.9},    {"Bed", 1.3, 1.6, 1.8, 2.0},
      {"Dresser", 0.8, 1.2, 0.4, 0.55},    {"Shelf", 0.6, 1.0, 0.3, 0.4},
      {"CounterTop", 1.2, 2.0, 0.55, 0.65},
  };
  using H = HeightClass;
  c.object_categories = {
      {"AlarmClock", H::surface, true},  {"Apple", H::surface, true},
      {"BaseballBat", H::floor, true},   {"BasketBall", H::floor, true},
      {"Bowl", H::surface, true},        {"GarbageCan", H::floor, true},
      {"HousePlant", H::floor, true},    {"Laptop", H::surface, true},
      {"Mug", H::surface, true},         {"SprayBottle", H::surface, true},
      {"Television", H::surface, true},  {"Vase", H::surface, true},
      {"Book", H::surface, true},        {"RemoteControl", H::surface, true},
      {"Box", H::floor, false},          {"FloorLamp", H::floor, false},
      {"Pillow", H::surface, false},     {"Statue", H::surface, false},
      {"Candle", H::surface, false},     {"Bottle", H::surface, false},
      {"Cup", H::surface, false},        {"Plate", H::surface, false},
      {"Newspaper", H::surface, false},  {"TissueBox", H::surface, false},
      {"Watch", H::surface, false},      {"Pot", H::surface, false},
      {"Pan", H::surface, false},        {"CellPhone", H::surface, false},
      {"KeyChain", H::surface, false},   {"CreditCard", H::surface, false},
      {"Pen", H::surface, false},        {"Pencil", H::surface, false},
  };
  c.validate();
  return c;
}

}  // namespace

const char* to_string(HeightClass h) { return h == HeightClass::floor ? "floor" : "surface"; }

HeightClass height_class_from_string(const std::string& s) {
  if (s == "floor") return HeightClass::floor;
  if (s == "surface") return HeightClass::surface;
  throw SchemaError("height", "unknown height class '" + s + "'");
}

const WallLayout& AssetCatalog::layout(const std::string& id) const {
  for (const auto& l : layouts)
    if (l.id == id) return l;
  throw PreconditionError("unknown_layout", "layout '" + id + "' is not in the catalog");
}

bool AssetCatalog::has_layout(const std::string& id) const {
  return std::any_of(layouts.begin(), layouts.end(), [&](const auto& l) { return l.id == id; });
}

std::vector<std::string> AssetCatalog::target_categories() const {
  std::vector<std::string> out;
  for (const auto& o : object_categories)
    if (o.target) out.push_back(o.name);
  return out;
}

const ObjectCategory* AssetCatalog::object_category(const std::string& name) const {
  for (const auto& o : object_categories)
    if (o.name == name) return &o;
  return nullptr;
}

int AssetCatalog::object_index(const std::string& name) const {
  for (std::size_t i = 0; i < object_categories.size(); ++i)
    if (object_categories[i].name == name) return static_cast<int>(i);
  return -1;
}

bool AssetCatalog::is_target(const std::string& name) const {
  const auto* o = object_category(name);
  return o && o->target;
}

void AssetCatalog::validate() const {
  if (furniture_categories.size() != 11)
    throw InvariantError("catalog must define 11 furniture categories, found " +
                         std::to_string(furniture_categories.size()));
  if (object_categories.size() != 32)
    throw InvariantError("catalog must define 32 object categories, found " +
                         std::to_string(object_categories.size()));
  std::set<std::string> names;
  for (const auto& o : object_categories)
    if (!names.insert(o.name).second) throw InvariantError("duplicate object category " + o.name);
  if (target_categories().size() != 14)
    throw InvariantError("catalog must designate 14 target categories, found " +
                         std::to_string(target_categories().size()));
  std::set<std::string> ids;
  for (const auto& l : layouts)
    if (!ids.insert(l.id).second) throw InvariantError("duplicate layout id " + l.id);
  for (const auto* group : {&splits.train_val, &splits.test_dev, &splits.test_standard})
    for (const auto& id : *group)
      if (!ids.count(id)) throw InvariantError("split references unknown layout " + id);
}

const AssetCatalog& default_catalog() {
  static const AssetCatalog catalog = build_default_catalog();
  return catalog;
}

}  // namespace navth
