#include "doctest.h"

#include "core/bvh.hpp"
#include "core/mesh.hpp"
#include "core/rng.hpp"
#include "support/test_helpers.hpp"

using namespace tokenwarp;
using twtest::k0;

namespace {

CameraIntrinsics tiny_k(int size) {
  return {50.0, 50.0, size / 2.0, size / 2.0, size, size};
}

}  // namespace

TEST_CASE("2x2 depth map yields 4 vertices and 2 triangles") {
  ProxyMesh mesh = build_mesh(twtest::constant_depth(2, 2, 1.f), tiny_k(2));
  CHECK(mesh.vertex_count() == 4);
  CHECK(mesh.triangle_count() == 2);
  // The fixed split: (TL,BL,TR) then (TR,BL,BR), in row-major vertex ids.
  CHECK(mesh.triangles[0] == std::array<int, 3>{0, 2, 1});
  CHECK(mesh.triangles[1] == std::array<int, 3>{1, 2, 3});
}

TEST_CASE("3x3 depth map yields 9 vertices and 8 triangles") {
  ProxyMesh mesh = build_mesh(twtest::constant_depth(3, 3, 1.f), tiny_k(3));
  CHECK(mesh.vertex_count() == 9);
  CHECK(mesh.triangle_count() == 8);
}

TEST_CASE("invalid-depth vertices drop exactly their triangles") {
  DepthMap tl_invalid(2, 2, 1.f);
  tl_invalid.set_value(0, 0, 0.f);
  ProxyMesh mesh = build_mesh(tl_invalid, tiny_k(2));
  CHECK(mesh.vertex_count() == 3);
  CHECK(mesh.triangle_count() == 1);  // only (TR,BL,BR) survives

  DepthMap tr_invalid(2, 2, 1.f);
  tr_invalid.set_value(1, 0, 0.f);
  mesh = build_mesh(tr_invalid, tiny_k(2));
  CHECK(mesh.triangle_count() == 0);  // TR sits in both triangles
}

TEST_CASE("vertices land on the unprojected pixel centers") {
  CameraIntrinsics K = k0();
  ProxyMesh mesh = build_mesh(twtest::constant_depth(128, 128, 2.f), K);
  CHECK(mesh.vertex_count() == 128u * 128u);
  for (size_t i = 0; i < mesh.vertices.size(); i += 997) {
    CHECK(std::abs(mesh.vertices[i].z() - 2.0) < 1e-9);
    Vec2 p = project_point(mesh.vertices[i], K);
    CHECK((p - mesh.vertex_pixels[i]).norm() < 1e-9);
  }
}

TEST_CASE("empty depth raises EmptyDepth") {
  CHECK_THROWS_AS(build_mesh(twtest::constant_depth(2, 2, 0.f), tiny_k(2)), Error);
}

TEST_CASE("mismatched dimensions are rejected") {
  CHECK_THROWS_AS(build_mesh(twtest::constant_depth(4, 4, 1.f), tiny_k(2)), Error);
}

TEST_CASE("depth-ratio culling drops rubber-sheet triangles") {
  DepthMap depth(2, 2, 1.f);
  depth.set_value(1, 1, 10.f);  // BR far away
  ProxyMesh keep_all = build_mesh(depth, tiny_k(2));
  CHECK(keep_all.triangle_count() == 2);

  MeshBuildOptions cull;
  cull.depth_ratio_cull = 1.5;
  ProxyMesh culled = build_mesh(depth, tiny_k(2), cull);
  CHECK(culled.triangle_count() == 1);  // (TL,BL,TR) stays, BR triangle goes
}

TEST_CASE("transform_mesh moves vertices and preserves topology") {
  ProxyMesh mesh = build_mesh(twtest::constant_depth(4, 4, 2.f), tiny_k(4));

  ProxyMesh same = transform_mesh(mesh, RigidTransform::identity());
  REQUIRE(same.vertices.size() == mesh.vertices.size());
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK(same.vertices[i].x() == mesh.vertices[i].x());
    CHECK(same.vertices[i].y() == mesh.vertices[i].y());
    CHECK(same.vertices[i].z() == mesh.vertices[i].z());
  }
  CHECK(same.triangles == mesh.triangles);

  RigidTransform shift(Mat3::Identity(), Vec3(0.2, 0, 0));
  ProxyMesh moved = transform_mesh(mesh, shift);
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK(moved.vertices[i].x() == doctest::Approx(mesh.vertices[i].x() + 0.2));
    CHECK(moved.vertices[i].y() == mesh.vertices[i].y());
    CHECK(moved.vertices[i].z() == mesh.vertices[i].z());
  }

  CounterRng rng(3);
  RigidTransform t = twtest::random_rigid(rng, 1.0, 1.0);
  ProxyMesh round = transform_mesh(transform_mesh(mesh, t), t.inverse());
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    CHECK((round.vertices[i] - mesh.vertices[i]).norm() < 1e-9);
  }
}

TEST_CASE("axial ray hits a constant-depth plane at its depth") {
  CameraIntrinsics K = k0();
  ProxyMesh mesh = build_mesh(twtest::constant_depth(128, 128, 2.f), K);
  MeshBvh bvh(mesh);
  auto hit = bvh.cast_ray(Vec3::Zero(), Vec3(0, 0, 1));
  REQUIRE(hit.has_value());
  CHECK(hit->t == doctest::Approx(2.0).epsilon(1e-9));
  CHECK((hit->point - Vec3(0, 0, 2)).norm() < 1e-6);
}

TEST_CASE("ray pointing away from all geometry misses") {
  ProxyMesh mesh = build_mesh(twtest::constant_depth(8, 8, 2.f), tiny_k(8));
  MeshBvh bvh(mesh);
  CHECK(!bvh.cast_ray(Vec3::Zero(), Vec3(0, 0, -1)).has_value());
}

TEST_CASE("closest of two stacked planes wins") {
  CameraIntrinsics K = tiny_k(8);
  ProxyMesh near = build_mesh(twtest::constant_depth(8, 8, 1.f), K);
  ProxyMesh far = build_mesh(twtest::constant_depth(8, 8, 2.f), K);
  ProxyMesh both = near;
  int offset = static_cast<int>(both.vertices.size());
  both.vertices.insert(both.vertices.end(), far.vertices.begin(),
                       far.vertices.end());
  both.vertex_pixels.insert(both.vertex_pixels.end(), far.vertex_pixels.begin(),
                            far.vertex_pixels.end());
  for (auto tri : far.triangles) {
    both.triangles.push_back({tri[0] + offset, tri[1] + offset, tri[2] + offset});
  }
  MeshBvh bvh(both);
  auto hit = bvh.cast_ray(Vec3::Zero(), Vec3(0, 0, 1));
  REQUIRE(hit.has_value());
  CHECK(hit->t == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("degenerate directions are rejected") {
  ProxyMesh mesh = build_mesh(twtest::constant_depth(4, 4, 1.f), tiny_k(4));
  MeshBvh bvh(mesh);
  CHECK_THROWS_AS(bvh.cast_ray(Vec3::Zero(), Vec3(0, 0, 2)), Error);
  CHECK_THROWS_AS(bvh.cast_ray(Vec3::Zero(), Vec3::Zero()), Error);
}

TEST_CASE("hits reconstruct from barycentric weights") {
  CameraIntrinsics K = tiny_k(16);
  DepthMap depth(16, 16, 1.f);
  CounterRng rng(5);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      depth.set_value(x, y, 1.f + static_cast<float>(rng.uniform()));
    }
  }
  ProxyMesh mesh = build_mesh(depth, K);
  MeshBvh bvh(mesh);
  for (int i = 0; i < 200; ++i) {
    Vec3 dir = unproject_pixel(Vec2(rng.uniform() * 15 + 0.5,
                                    rng.uniform() * 15 + 0.5), 1.0, K)
                   .normalized();
    auto hit = bvh.cast_ray(Vec3::Zero(), dir);
    if (!hit) continue;
    const auto& tri = mesh.triangles[hit->triangle];
    Vec3 rebuilt = hit->barycentric(0) * mesh.vertices[tri[0]] +
                   hit->barycentric(1) * mesh.vertices[tri[1]] +
                   hit->barycentric(2) * mesh.vertices[tri[2]];
    CHECK((rebuilt - hit->point).norm() < 1e-6);
    CHECK(hit->barycentric.minCoeff() >= -1e-9);
    CHECK(hit->barycentric.sum() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(hit->t > 0.0);
  }
}

TEST_CASE("BVH equals brute force on random rays") {
  CameraIntrinsics K = tiny_k(64);
  DepthMap depth(64, 64, 1.f);
  CounterRng terrain(101);
  for (int y = 0; y < 64; ++y) {
    for (int x = 0; x < 64; ++x) {
      float v = 1.f + static_cast<float>(terrain.uniform()) * 3.f;
      if (terrain.uniform() < 0.05) v = 0.f;  // punch holes
      depth.set_value(x, y, v);
    }
  }
  ProxyMesh mesh = build_mesh(depth, K);
  REQUIRE(mesh.triangle_count() <= 10000);
  MeshBvh bvh(mesh);

  CounterRng rng(202);
  int hits = 0;
  for (int i = 0; i < 1000; ++i) {
    Vec3 origin(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1, rng.uniform() * -0.5);
    Vec3 dir;
    if (i % 2 == 0) {
      // Aimed at a random image coordinate; mostly hits.
      Vec2 px(rng.uniform() * 64.0, rng.uniform() * 64.0);
      dir = (unproject_pixel(px, 2.0, K) - origin);
    } else {
      dir = Vec3(rng.uniform() * 2 - 1, rng.uniform() * 2 - 1,
                 rng.uniform() * 2 - 1);
    }
    if (dir.norm() < 1e-9) dir = Vec3::UnitZ();
    dir.normalize();

    auto fast = bvh.cast_ray(origin, dir);
    auto slow = twtest::brute_force_cast(mesh, origin, dir);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) {
      ++hits;
      CHECK(fast->triangle == slow->triangle);
      CHECK(fast->t == slow->t);  // bitwise: same intersector on both paths
    }
  }
  CHECK(hits > 100);  // the scene must actually exercise the tree
}
