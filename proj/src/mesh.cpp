#include "polydg/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

namespace polydg {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) { return 0.5 * cross(b - a, c - a); }

[[noreturn]] void geometry_error(Index e, const std::string& what) {
  throw MeshError(MeshError::Kind::geometry, "element " + std::to_string(e) + ": " + what);
}

bool inside_polygon(const std::vector<Vec2>& vertices, std::span<const Index> loop, const Vec2& x) {
  bool inside = false;
  for (Index i = 0; i < loop.size(); ++i) {
    const Vec2& a = vertices[loop[i]];
    const Vec2& b = vertices[loop[(i + 1) % loop.size()]];
    const Vec2 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = (x - a).dot(ab) / len2;
    if (t >= -1e-12 && t <= 1.0 + 1e-12 && std::abs(cross(ab, x - a)) <= 1e-12 * len2) return true;
    if ((a.y() > x.y()) != (b.y() > x.y())) {
      const double xi = a.x() + (x.y() - a.y()) * ab.x() / ab.y();
      if (x.x() < xi) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

const char* to_string(Region region) {
  return region == Region::poroelastic ? "poroelastic" : "acoustic";
}

const char* to_string(FaceClass kind) {
  switch (kind) {
    case FaceClass::p_interior: return "P_INTERIOR";
    case FaceClass::p_boundary: return "P_BOUNDARY";
    case FaceClass::a_interior: return "A_INTERIOR";
    case FaceClass::a_boundary: return "A_BOUNDARY";
    case FaceClass::interface: return "INTERFACE";
  }
  return "?";
}

PolyMesh PolyMesh::from_polygons(std::vector<Vec2> vertices, std::vector<std::vector<Index>> elements,
                                 std::vector<Region> regions) {
  if (elements.size() != regions.size()) {
    throw MeshError(MeshError::Kind::parse, "region count does not match element count");
  }
  PolyMesh mesh;
  mesh.vertices_ = std::move(vertices);
  mesh.elements_ = std::move(elements);
  mesh.regions_ = std::move(regions);

  const Index ne = mesh.elements_.size();
  mesh.diameters_.resize(ne);
  mesh.areas_.resize(ne);
  mesh.centroids_.resize(ne);
  mesh.boxes_.resize(ne);
  mesh.fans_.resize(ne);
  mesh.element_faces_.resize(ne);

  for (Index e = 0; e < ne; ++e) {
    const auto& loop = mesh.elements_[e];
    const Index k = loop.size();
    if (k < 3) geometry_error(e, "fewer than three vertices");
    for (Index i = 0; i < k; ++i) {
      if (loop[i] >= mesh.vertices_.size()) {
        throw MeshError(MeshError::Kind::parse,
                        "element " + std::to_string(e) + " references a missing vertex");
      }
    }
    for (Index i = 0; i < k; ++i) {
      if (loop[i] == loop[(i + 1) % k]) geometry_error(e, "vertex repeated consecutively");
    }

    double area = 0.0;
    Vec2 moment = Vec2::Zero();
    Rectangle box{mesh.vertices_[loop[0]].x(), mesh.vertices_[loop[0]].x(), mesh.vertices_[loop[0]].y(),
                  mesh.vertices_[loop[0]].y()};
    double diam = 0.0;
    for (Index i = 0; i < k; ++i) {
      const Vec2& a = mesh.vertices_[loop[i]];
      const Vec2& b = mesh.vertices_[loop[(i + 1) % k]];
      const double c = cross(a, b);
      area += 0.5 * c;
      moment += (a + b) * c / 6.0;
      box.x0 = std::min(box.x0, a.x());
      box.x1 = std::max(box.x1, a.x());
      box.y0 = std::min(box.y0, a.y());
      box.y1 = std::max(box.y1, a.y());
      for (Index j = i + 1; j < k; ++j) diam = std::max(diam, (a - mesh.vertices_[loop[j]]).norm());
    }
    if (!(area > 0.0)) geometry_error(e, "non-positive signed area (vertices must be counter-clockwise)");
    const Vec2 centroid = moment / area;

    // Star-shapedness w.r.t. the centroid: every fan triangle positive and the
    // fan winds exactly once.
    auto& fan = mesh.fans_[e];
    fan.reserve(k);
    double angle = 0.0;
    for (Index i = 0; i < k; ++i) {
      const Vec2& a = mesh.vertices_[loop[i]];
      const Vec2& b = mesh.vertices_[loop[(i + 1) % k]];
      const double tri = signed_area(centroid, a, b);
      if (!(tri > 1e-14 * diam * diam)) geometry_error(e, "not star-shaped with respect to its centroid");
      angle += std::atan2(cross(a - centroid, b - centroid), (a - centroid).dot(b - centroid));
      fan.push_back(FanTriangle{{centroid, a, b}, tri, invalid_index});
    }
    if (std::abs(angle - 2.0 * std::numbers::pi) > 1e-8) geometry_error(e, "self-intersecting polygon");

    mesh.areas_[e] = area;
    mesh.centroids_[e] = centroid;
    mesh.diameters_[e] = diam;
    mesh.boxes_[e] = box;
  }

  // Faces: first visit creates the face, second attaches the neighbor.
  std::map<std::pair<Index, Index>, Index> edge_to_face;
  for (Index e = 0; e < ne; ++e) {
    const auto& loop = mesh.elements_[e];
    const Index k = loop.size();
    mesh.element_faces_[e].resize(k);
    for (Index i = 0; i < k; ++i) {
      const Index a = loop[i];
      const Index b = loop[(i + 1) % k];
      const auto key = std::minmax(a, b);
      auto it = edge_to_face.find(key);
      if (it == edge_to_face.end()) {
        Face face;
        face.vertices = {a, b};
        face.owner = e;
        const Vec2 d = mesh.vertices_[b] - mesh.vertices_[a];
        face.measure = d.norm();
        face.normal = Vec2(d.y(), -d.x()) / face.measure;
        edge_to_face.emplace(key, mesh.faces_.size());
        mesh.element_faces_[e][i] = mesh.faces_.size();
        mesh.faces_.push_back(face);
      } else {
        Face& face = mesh.faces_[it->second];
        if (face.neighbor != invalid_index) {
          throw MeshError(MeshError::Kind::topology,
                          "edge (" + std::to_string(a) + "," + std::to_string(b) + ") shared by more than two elements");
        }
        if (face.owner == e) geometry_error(e, "edge listed twice in the same element");
        if (face.vertices[0] != b) {
          throw MeshError(MeshError::Kind::topology, "inconsistent orientation on edge (" + std::to_string(a) + "," +
                                                         std::to_string(b) + ")");
        }
        face.neighbor = e;
        mesh.element_faces_[e][i] = it->second;
      }
    }
  }

  for (Face& face : mesh.faces_) {
    const Region ro = mesh.regions_[face.owner];
    if (face.is_boundary()) {
      face.kind = ro == Region::poroelastic ? FaceClass::p_boundary : FaceClass::a_boundary;
      continue;
    }
    const Region rn = mesh.regions_[face.neighbor];
    if (ro == rn) {
      face.kind = ro == Region::poroelastic ? FaceClass::p_interior : FaceClass::a_interior;
      continue;
    }
    face.kind = FaceClass::interface;
    if (ro == Region::acoustic) {
      std::swap(face.owner, face.neighbor);
      std::swap(face.vertices[0], face.vertices[1]);
      face.normal = -face.normal;
    }
  }

  for (Index e = 0; e < ne; ++e) {
    for (Index i = 0; i < mesh.fans_[e].size(); ++i) mesh.fans_[e][i].face = mesh.element_faces_[e][i];
  }
  mesh.build_locator();
  return mesh;
}

Rectangle PolyMesh::extent() const {
  Rectangle r{vertices_.front().x(), vertices_.front().x(), vertices_.front().y(), vertices_.front().y()};
  for (const Vec2& v : vertices_) {
    r.x0 = std::min(r.x0, v.x());
    r.x1 = std::max(r.x1, v.x());
    r.y0 = std::min(r.y0, v.y());
    r.y1 = std::max(r.y1, v.y());
  }
  return r;
}

void PolyMesh::build_locator() {
  Locator& loc = locator_;
  loc.box = extent();
  const double n = std::ceil(std::sqrt(static_cast<double>(num_elements())));
  loc.nx = loc.ny = std::max<Index>(1, static_cast<Index>(n));
  loc.buckets.assign(loc.nx * loc.ny, {});
  const double dx = (loc.box.x1 - loc.box.x0) / static_cast<double>(loc.nx);
  const double dy = (loc.box.y1 - loc.box.y0) / static_cast<double>(loc.ny);
  auto cell = [](double v, Index n) { return static_cast<Index>(std::clamp(v, 0.0, static_cast<double>(n - 1))); };
  for (Index e = 0; e < num_elements(); ++e) {
    const Rectangle& b = boxes_[e];
    const Index i0 = cell(std::floor((b.x0 - loc.box.x0) / dx), loc.nx);
    const Index i1 = cell(std::floor((b.x1 - loc.box.x0) / dx), loc.nx);
    const Index j0 = cell(std::floor((b.y0 - loc.box.y0) / dy), loc.ny);
    const Index j1 = cell(std::floor((b.y1 - loc.box.y0) / dy), loc.ny);
    for (Index j = j0; j <= j1; ++j)
      for (Index i = i0; i <= i1; ++i) loc.buckets[j * loc.nx + i].push_back(e);
  }
}

double PolyMesh::max_diameter() const { return *std::max_element(diameters_.begin(), diameters_.end()); }

Index PolyMesh::count(Region region) const {
  return static_cast<Index>(std::count(regions_.begin(), regions_.end(), region));
}

Index PolyMesh::count(FaceClass kind) const {
  return static_cast<Index>(
      std::count_if(faces_.begin(), faces_.end(), [kind](const Face& f) { return f.kind == kind; }));
}

std::optional<Index> PolyMesh::locate(const Vec2& x) const {
  const Locator* locator = &locator_;
  const Rectangle& box = locator->box;
  if (x.x() < box.x0 || x.x() > box.x1 || x.y() < box.y0 || x.y() > box.y1) return std::nullopt;
  const double dx = (box.x1 - box.x0) / locator->nx;
  const double dy = (box.y1 - box.y0) / locator->ny;
  const Index i = std::min<Index>(locator->nx - 1, static_cast<Index>((x.x() - box.x0) / dx));
  const Index j = std::min<Index>(locator->ny - 1, static_cast<Index>((x.y() - box.y0) / dy));
  for (Index e : locator->buckets[j * locator->nx + i]) {
    if (inside_polygon(vertices_, elements_[e], x)) return e;
  }
  return std::nullopt;
}

PolyMesh parse_mesh(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    lines.push_back(line);
  }
  auto parse_error = [](const std::string& what) { return MeshError(MeshError::Kind::parse, what); };
  if (lines.empty()) throw parse_error("empty mesh file");

  std::istringstream header(lines[0]);
  long long nv = -1, ne = -1;
  if (!(header >> nv >> ne) || nv < 3 || ne < 1) throw parse_error("bad header, expected `NV NE`");
  if (static_cast<long long>(lines.size()) < 1 + nv + ne) throw parse_error("file truncated");

  std::vector<Vec2> vertices(nv);
  for (long long i = 0; i < nv; ++i) {
    std::istringstream ls(lines[1 + i]);
    double x, y;
    if (!(ls >> x >> y)) throw parse_error("bad vertex line " + std::to_string(i));
    vertices[i] = Vec2(x, y);
  }

  std::vector<std::vector<Index>> elements(ne);
  std::vector<Region> regions(ne);
  for (long long e = 0; e < ne; ++e) {
    std::istringstream ls(lines[1 + nv + e]);
    char tag;
    long long k;
    if (!(ls >> tag >> k) || k < 1) throw parse_error("bad element line " + std::to_string(e));
    if (tag == 'p') {
      regions[e] = Region::poroelastic;
    } else if (tag == 'a') {
      regions[e] = Region::acoustic;
    } else {
      throw parse_error("unknown region tag '" + std::string(1, tag) + "'");
    }
    for (long long i = 0; i < k; ++i) {
      long long v;
      if (!(ls >> v) || v < 0 || v >= nv) throw parse_error("bad vertex index in element " + std::to_string(e));
      elements[e].push_back(static_cast<Index>(v));
    }
  }

  // Stitch coincident vertices.
  double xmin = vertices[0].x(), xmax = xmin, ymin = vertices[0].y(), ymax = ymin;
  for (const Vec2& v : vertices) {
    xmin = std::min(xmin, v.x());
    xmax = std::max(xmax, v.x());
    ymin = std::min(ymin, v.y());
    ymax = std::max(ymax, v.y());
  }
  const double tol = 1e-10 * std::hypot(xmax - xmin, ymax - ymin);
  std::vector<Index> order(vertices.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return vertices[a].x() < vertices[b].x(); });
  std::vector<Index> rep(vertices.size());
  std::iota(rep.begin(), rep.end(), Index{0});
  auto find = [&](Index i) {
    while (rep[i] != i) i = rep[i] = rep[rep[i]];
    return i;
  };
  for (Index a = 0; a < order.size(); ++a) {
    for (Index b = a + 1; b < order.size() && vertices[order[b]].x() - vertices[order[a]].x() <= tol; ++b) {
      if ((vertices[order[a]] - vertices[order[b]]).norm() <= tol) {
        const Index ra = find(order[a]), rb = find(order[b]);
        rep[std::max(ra, rb)] = std::min(ra, rb);
      }
    }
  }
  std::vector<Index> renumber(vertices.size(), invalid_index);
  std::vector<Vec2> kept;
  for (Index i = 0; i < vertices.size(); ++i)
    if (find(i) == i) {
      renumber[i] = kept.size();
      kept.push_back(vertices[i]);
    }
  for (auto& loop : elements)
    for (Index& v : loop) v = renumber[find(v)];

  return PolyMesh::from_polygons(std::move(kept), std::move(elements), std::move(regions));
}

PolyMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MeshError(MeshError::Kind::parse, "cannot open mesh file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_mesh(buffer.str());
}

void write_mesh(const std::filesystem::path& path, const PolyMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write mesh file " + path.string());
  out.precision(17);
  out << mesh.num_vertices() << ' ' << mesh.num_elements() << '\n';
  for (const Vec2& v : mesh.vertices()) out << v.x() << ' ' << v.y() << '\n';
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    out << (mesh.region(e) == Region::poroelastic ? 'p' : 'a') << ' ' << mesh.element(e).size();
    for (Index v : mesh.element(e)) out << ' ' << v;
    out << '\n';
  }
}

PolyMesh build_cartesian_mesh(const Rectangle& domain, Index nx, Index ny, const RegionFn& region_fn) {
  if (nx < 1 || ny < 1) throw MeshError(MeshError::Kind::geometry, "nx and ny must be at least 1");
  if (!(domain.x1 > domain.x0) || !(domain.y1 > domain.y0)) {
    throw MeshError(MeshError::Kind::geometry, "degenerate domain");
  }
  std::vector<Vec2> vertices;
  vertices.reserve((nx + 1) * (ny + 1));
  for (Index j = 0; j <= ny; ++j) {
    const double y = domain.y0 + (domain.y1 - domain.y0) * static_cast<double>(j) / static_cast<double>(ny);
    for (Index i = 0; i <= nx; ++i) {
      const double x = domain.x0 + (domain.x1 - domain.x0) * static_cast<double>(i) / static_cast<double>(nx);
      vertices.emplace_back(x, y);
    }
  }
  std::vector<std::vector<Index>> elements;
  std::vector<Region> regions;
  elements.reserve(nx * ny);
  for (Index j = 0; j < ny; ++j) {
    for (Index i = 0; i < nx; ++i) {
      const Index v0 = j * (nx + 1) + i;
      elements.push_back({v0, v0 + 1, v0 + nx + 2, v0 + nx + 1});
      const Vec2 c = 0.25 * (vertices[v0] + vertices[v0 + 1] + vertices[v0 + nx + 2] + vertices[v0 + nx + 1]);
      regions.push_back(region_fn(c));
    }
  }
  return PolyMesh::from_polygons(std::move(vertices), std::move(elements), std::move(regions));
}

double regularity_constant(const PolyMesh& mesh) {
  constexpr double d = 2.0;
  double worst = 0.0;
  for (Index e = 0; e < mesh.num_elements(); ++e) {
    for (const FanTriangle& tri : mesh.sub_triangulation(e)) {
      worst = std::max(worst, mesh.diameter(e) * mesh.face(tri.face).measure / (d * tri.area));
    }
  }
  return worst;
}

BoundedVariationReport bounded_variation_check(const PolyMesh& mesh, std::span<const int> degrees,
                                               double threshold) {
  if (degrees.size() != mesh.num_elements()) throw ModelError("degree vector does not match element count");
  BoundedVariationReport report;
  for (const Face& f : mesh.faces()) {
    if (f.is_boundary()) continue;
    const double h1 = mesh.diameter(f.owner), h2 = mesh.diameter(f.neighbor);
    const double p1 = degrees[f.owner], p2 = degrees[f.neighbor];
    report.max_h_ratio = std::max(report.max_h_ratio, std::max(h1 / h2, h2 / h1));
    report.max_p_ratio = std::max(report.max_p_ratio, std::max(p1 / p2, p2 / p1));
  }
  report.warning = report.max_h_ratio > threshold || report.max_p_ratio > threshold;
  return report;
}

}  // namespace polydg
