#include "shapecast/toy.hpp"

#include "shapecast/errors.hpp"

namespace shapecast::toy {

namespace {

// Cell values per month, rows top-down as latitude, columns as longitude.
constexpr int kP1[3][5][5] = {
    {{0, 1, 2, 1, 0}, {2, 9, 6, 5, 2}, {1, 5, 5, 3, 1}, {2, 3, 4, 3, 2}, {0, 1, 2, 1, 0}},
    {{0, 2, 3, 2, 1}, {1, 5, 5, 4, 3}, {2, 5, 8, 3, 2}, {1, 4, 4, 3, 3}, {1, 2, 1, 2, 1}},
    {{0, 2, 4, 3, 0}, {2, 2, 6, 5, 4}, {2, 5, 6, 9, 3}, {2, 2, 6, 5, 4}, {2, 2, 4, 3, 0}},
};
constexpr int kP2[3][5][5] = {
    {{1, 0, 1, 0, 1}, {1, 9, 6, 4, 0}, {0, 6, 3, 3, 3}, {2, 2, 3, 2, 0}, {0, 1, 2, 1, 2}},
    {{1, 1, 3, 2, 0}, {3, 6, 6, 5, 2}, {3, 6, 9, 2, 2}, {3, 5, 2, 1, 2}, {0, 3, 4, 3, 0}},
    {{1, 2, 3, 2, 1}, {1, 2, 8, 7, 2}, {1, 4, 8, 9, 5}, {1, 2, 8, 7, 2}, {0, 1, 2, 1, 3}},
};
constexpr int kP3[3][5][5] = {
    {{1, 1, 1, 1, 1}, {1, 4, 5, 4, 1}, {1, 5, 8, 5, 1}, {1, 4, 5, 4, 1}, {1, 1, 1, 1, 1}},
    {{1, 1, 1, 1, 1}, {1, 4, 5, 4, 1}, {1, 5, 8, 5, 1}, {1, 4, 5, 4, 1}, {1, 1, 1, 1, 1}},
    {{1, 1, 1, 1, 1}, {1, 4, 5, 4, 1}, {1, 5, 8, 5, 1}, {1, 4, 5, 4, 1}, {1, 1, 1, 1, 1}},
};

Sequence3D build(const int (&p)[3][5][5]) {
    Sequence3D s = Sequence3D::zeros(Origin3{}, Dims3{5, 5, 3});
    for (int t = 0; t < 3; ++t)
        for (int la = 0; la < 5; ++la)
            for (int lo = 0; lo < 5; ++lo) s.at(la, lo, t) = double(p[t][la][lo]);
    return s;
}

}  // namespace

Sequence3D pattern(int index) {
    switch (index) {
        case 1: return build(kP1);
        case 2: return build(kP2);
        case 3: return build(kP3);
        default: throw ValidationError("toy::pattern: index must be 1, 2 or 3");
    }
}

const SpatialKernel& spatial_kernel() {
    static const SpatialKernel k = {{
        {{0.01, 0.05, 0.1, 0.05, 0.01}},
        {{0.05, 0.3, 0.5, 0.3, 0.05}},
        {{0.1, 0.5, 1.0, 0.5, 0.1}},
        {{0.05, 0.3, 0.5, 0.3, 0.05}},
        {{0.01, 0.05, 0.1, 0.05, 0.01}},
    }};
    return k;
}

Report run() {
    Sequence3D p1 = pattern(1), p2 = pattern(2), p3 = pattern(3);
    DensityCube c1 = to_density_cube(p1, CoordMode::raw);
    DensityCube c2 = to_density_cube(p2, CoordMode::raw);
    DensityCube c3 = to_density_cube(p3, CoordMode::raw);
    Report r;
    r.emd_12 = emd_fixed(c1, c2);
    r.emd_13 = emd_fixed(c1, c3);
    r.sp_12 = spatial_distance_baseline(p1, p2, spatial_kernel());
    r.sp_13 = spatial_distance_baseline(p1, p3, spatial_kernel());
    r.ed_12 = euclidean_baseline(p1, p2);
    r.ed_13 = euclidean_baseline(p1, p3);
    r.emd_prefers_p2 = r.emd_12 < r.emd_13;
    r.sp_prefers_p3 = r.sp_12 > r.sp_13;
    r.ed_tied = r.ed_12 == r.ed_13;
    return r;
}

}  // namespace shapecast::toy
