#pragma once

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "polydg/types.hpp"

namespace polydg {

enum class Region : unsigned char { poroelastic, acoustic };

enum class FaceClass : unsigned char {
  p_interior,
  p_boundary,
  a_interior,
  a_boundary,
  interface,
};

const char* to_string(Region region);
const char* to_string(FaceClass kind);

/// A mesh edge. The normal points out of `owner`; on interface faces the owner
/// is always the poroelastic element, so the normal is n_p.
struct Face {
  std::array<Index, 2> vertices{};
  Index owner = invalid_index;
  Index neighbor = invalid_index;
  Vec2 normal = Vec2::Zero();
  FaceClass kind = FaceClass::p_boundary;
  double measure = 0.0;

  bool is_boundary() const noexcept { return neighbor == invalid_index; }
};

/// Triangle of the centroid fan attached to one face of an element.
struct FanTriangle {
  std::array<Vec2, 3> vertices;  // centroid, then the face endpoints in CCW order
  double area = 0.0;
  Index face = invalid_index;
};

struct Rectangle {
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;
};

/// Immutable polygonal mesh with classified faces and a centroid-fan
/// sub-triangulation of every element.
class PolyMesh {
 public:
  /// Validates the polygons and builds faces. Throws MeshError.
  static PolyMesh from_polygons(std::vector<Vec2> vertices,
                                std::vector<std::vector<Index>> elements,
                                std::vector<Region> regions);

  Index num_elements() const noexcept { return elements_.size(); }
  Index num_faces() const noexcept { return faces_.size(); }
  Index num_vertices() const noexcept { return vertices_.size(); }

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  std::span<const Index> element(Index e) const { return elements_[e]; }
  Region region(Index e) const { return regions_[e]; }
  const std::vector<Region>& regions() const noexcept { return regions_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  const Face& face(Index f) const { return faces_[f]; }

  /// Faces of element `e` in loop order; entry i is the edge (v_i, v_{i+1}).
  std::span<const Index> element_faces(Index e) const { return element_faces_[e]; }
  std::span<const FanTriangle> sub_triangulation(Index e) const { return fans_[e]; }

  double diameter(Index e) const { return diameters_[e]; }
  double area(Index e) const { return areas_[e]; }
  const Vec2& centroid(Index e) const { return centroids_[e]; }
  /// Axis-aligned bounding box of element `e`.
  const Rectangle& bounding_box(Index e) const { return boxes_[e]; }
  Rectangle extent() const;
  double max_diameter() const;

  Index count(Region region) const;
  Index count(FaceClass kind) const;

  /// Element containing `x` (points on shared edges go to either side), or nullopt.
  std::optional<Index> locate(const Vec2& x) const;

 private:
  PolyMesh() = default;
  void build_locator();

  std::vector<Vec2> vertices_;
  std::vector<std::vector<Index>> elements_;
  std::vector<Region> regions_;
  std::vector<Face> faces_;
  std::vector<std::vector<Index>> element_faces_;
  std::vector<std::vector<FanTriangle>> fans_;
  std::vector<double> diameters_;
  std::vector<double> areas_;
  std::vector<Vec2> centroids_;
  std::vector<Rectangle> boxes_;

  struct Locator {
    Rectangle box;
    Index nx = 0, ny = 0;
    std::vector<std::vector<Index>> buckets;
  };
  Locator locator_;
};

using RegionFn = std::function<Region(const Vec2&)>;

/// Reads the plain-text mesh format (`NV NE`, vertex lines, then
/// `p|a k v1 .. vk` element lines; `#` starts a comment line). Coincident
/// vertices closer than 1e-10 times the domain diameter are merged.
PolyMesh load_mesh(const std::filesystem::path& path);
PolyMesh parse_mesh(std::string_view text);
void write_mesh(const std::filesystem::path& path, const PolyMesh& mesh);

PolyMesh build_cartesian_mesh(const Rectangle& domain, Index nx, Index ny,
                              const RegionFn& region_fn);

/// max over elements and faces of h_K |F| / (d |S_K^F|).
double regularity_constant(const PolyMesh& mesh);

struct BoundedVariationReport {
  double max_h_ratio = 1.0;
  double max_p_ratio = 1.0;
  bool warning = false;
};

/// Neighbor size and degree ratios over faces shared by two elements.
BoundedVariationReport bounded_variation_check(const PolyMesh& mesh, std::span<const int> degrees,
                                               double threshold = 3.0);

}  // namespace polydg
