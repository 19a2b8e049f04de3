#pragma once

#include <memory>
#include <span>
#include <vector>

#include "binpick/octree.hpp"
#include "binpick/point_cloud.hpp"
#include "binpick/registration.hpp"

namespace binpick {

struct PolicyParams {
  double alpha = 1.0, beta = 1.0;  // GRS = (alpha*P_self + beta*P_grasp) * P_system
  double k1 = 1.0, k2 = 0.5;       // P_self = k1 * normalized height + k2 * sin(axis angle)
  double k3 = 1.0, k4 = -0.5;      // grasp point objective k3*de + k4*dn (k4 < 0
                                   // prefers clearance from neighbors)
  int k_neighbors = 3;             // K of the clearance term
  int overlap_threshold = 30;      // points; above this P_system drops to 0
  double overlap_delta = 0.003;    // proximity radius for overlap counting (m)
  double change_tau = 0.005;       // centroid displacement gate (m)
  double clearance_cap = 1.0;      // P_grasp for a single-object scene (m^2)
  int grasp_samples = 101;         // axis samples for the grasp point search
  double grip_margin = 0.01;       // added to the second-axis extent (m)
  double grip_max = 0.1;           // gripper opening limit (m)
  Vec3 up = Vec3::UnitZ();         // scene vertical
  int octree_depth = 8;

  void validate() const;
};

/// One registered object: the full template cloud moved into the scene by
/// the estimated pose, its barycenter, and its principal axis.
struct ObjectState {
  int id = -1;
  RigidTransform pose;  // template -> scene
  std::shared_ptr<const PointCloud> posed_template;
  std::shared_ptr<const Octree> template_index;
  Vec3 centroid = Vec3::Zero();  // barycenter of the posed template
  Vec3 axis = Vec3::UnitX();     // first principal axis, unit
  Vec3 axis_low = Vec3::Zero();  // segment endpoints; low has the smaller height
  Vec3 axis_high = Vec3::Zero();
  double axis_angle = 0.0;       // from the horizontal plane, [0, pi/2]
  Vec3 second_axis = Vec3::UnitY();
  double second_extent = 0.0;    // template extent along second_axis (m)
};

ObjectState make_object_state(int id, const PointCloud& template_cloud,
                              const RigidTransform& pose, const PolicyParams& params);

/// Object instability: k1 * height share + k2 * sin(axis angle). The height
/// share normalizes this object's barycenter height over [scene_h_min,
/// scene_h_max] (the scene's barycenter height range); a degenerate range
/// (single object) counts as 1.
double p_self(const ObjectState& obj, double scene_h_min, double scene_h_max,
              const PolicyParams& params);

/// Mean squared distance from obj's barycenter to its min(K, N-1) nearest
/// other barycenters; larger means more clearance. A scene with no other
/// objects returns params.clearance_cap.
double p_grasp(const ObjectState& obj, std::span<const Vec3> other_centroids,
               const PolicyParams& params);

/// Points of obj's posed template within overlap_delta of any other
/// object's posed template (each point counted once).
int overlap_count(const ObjectState& obj, std::span<const ObjectState> all_objects,
                  double overlap_delta);

/// 1 when the overlap count stays within overlap_threshold, else 0.
int p_system(const ObjectState& obj, std::span<const ObjectState> all_objects,
             const PolicyParams& params);

struct ObjectScore {
  int id = -1;
  double p_self = 0.0;
  double p_grasp = 0.0;
  int p_system = 1;
  double grs = 0.0;
};

struct Ranking {
  std::vector<ObjectScore> ranked;  // descending GRS, ties by lower id
  int selected_id = -1;
  bool forced = false;  // every GRS was 0; fell back to alpha*P_self + beta*P_grasp
};

/// Scores every object and ranks by GRS (higher is safer to pick).
/// Throws EmptySceneError when objects is empty.
Ranking grs_rank(std::span<const ObjectState> objects, const PolicyParams& params);

/// Minimizes k3*de + k4*dn over `samples` uniform points of the principal
/// axis segment, where de is the distance to the barycenter and dn the
/// distance to the nearest other object's posed template (0 when there are
/// no other objects). A degenerate axis falls back to the barycenter.
Vec3 grasp_point(const ObjectState& obj, std::span<const ObjectState> all_objects,
                 const PolicyParams& params, int samples);

struct GraspPose {
  double yaw = 0.0;    // horizontal direction perpendicular to the axis, [0, pi)
  double width = 0.0;  // second-axis extent + margin, clamped to grip_max
};

GraspPose grasp_pose(const ObjectState& obj, const PolicyParams& params);

struct SceneChange {
  bool changed = false;
  double max_displacement = 0.0;  // over greedily matched centroid pairs
};

/// Greedy one-to-one matching of previous to current centroids by
/// ascending distance; reports change when counts differ or any matched
/// pair moved farther than change_tau.
SceneChange scene_changed(std::span<const Vec3> prev_centroids,
                          std::span<const Vec3> curr_centroids, const PolicyParams& params);

}  // namespace binpick
