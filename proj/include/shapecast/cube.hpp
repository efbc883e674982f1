#pragma once

#include <filesystem>
#include <vector>

#include "shapecast/params.hpp"
#include "shapecast/zones.hpp"

namespace shapecast {

struct Dims3 {
    int w_lat = 1, w_lon = 1, len = 1;
    bool operator==(const Dims3&) const = default;
    auto operator<=>(const Dims3&) const = default;
    long long volume() const { return (long long)w_lat * w_lon * len; }
};

struct Origin3 {
    int lat = 0, lon = 0, t = 0;
    bool operator==(const Origin3&) const = default;
    auto operator<=>(const Origin3&) const = default;
};

// Dense spatio-temporal box of fatality values. Raw extractions hold integer
// counts; scenario means reuse the type with fractional values.
struct Sequence3D {
    Origin3 origin;
    Dims3 dims;
    std::vector<double> values;  // index ((lat*w_lon)+lon)*len + t

    static Sequence3D zeros(Origin3 origin, Dims3 dims);
    double& at(int la, int lo, int t) {
        return values[(size_t(la) * dims.w_lon + lo) * dims.len + t];
    }
    double at(int la, int lo, int t) const {
        return values[(size_t(la) * dims.w_lon + lo) * dims.len + t];
    }
    double total() const;
    int count_nonzero() const;
};

struct CubePoint {
    double u_lon = 0, u_lat = 0, u_t = 0;
    double weight = 0;
};

// Weighted point cloud with unit total mass. In normalized mode coordinates
// live in [0,1]; raw mode keeps integer lattice offsets (used to reproduce
// textbook-style worked examples and for debugging).
struct DensityCube {
    std::vector<CubePoint> points;
    int n_active = 0;
    Dims3 source_dims;
    CoordMode coords = CoordMode::normalized;

    double mass() const;
};

// Copies the zone's bounding box over [t_start, t_end]; cells inside the box
// but outside the zone's cell set are taken as stored.
Sequence3D extract_sequence(const FatalityField& field, const ActiveZone& zone, int t_start,
                            int t_end);
Sequence3D extract_box(const FatalityField& field, Origin3 origin, Dims3 dims);

// Each non-zero cell becomes one point; weights are values over the total.
// Dimensions of size 1 normalize to coordinate 0. Throws ValidationError on
// an all-zero sequence.
DensityCube to_density_cube(const Sequence3D& seq, CoordMode mode = CoordMode::normalized);

// k quarter-turns around the time axis: (u_lon, u_lat) -> (u_lat, E - u_lon)
// with E the lon extent (1 in normalized mode). Weights and u_t unchanged.
DensityCube rotate90(const DensityCube& cube, int k);

// Lattice counterpart of rotate90, consistent with it under to_density_cube.
Sequence3D rotate_sequence90(const Sequence3D& seq, int k);

void dump_cube_csv(const DensityCube& cube, const std::filesystem::path& path);

}  // namespace shapecast
