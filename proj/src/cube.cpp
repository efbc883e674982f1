#include "shapecast/cube.hpp"

#include "shapecast/csv.hpp"
#include "shapecast/errors.hpp"

namespace shapecast {

Sequence3D Sequence3D::zeros(Origin3 origin, Dims3 dims) {
    Sequence3D s;
    s.origin = origin;
    s.dims = dims;
    s.values.assign(size_t(dims.volume()), 0.0);
    return s;
}

double Sequence3D::total() const {
    double s = 0;
    for (double v : values) s += v;
    return s;
}

int Sequence3D::count_nonzero() const {
    int n = 0;
    for (double v : values)
        if (v != 0.0) ++n;
    return n;
}

double DensityCube::mass() const {
    double s = 0;
    for (const auto& p : points) s += p.weight;
    return s;
}

Sequence3D extract_box(const FatalityField& field, Origin3 origin, Dims3 dims) {
    Sequence3D s = Sequence3D::zeros(origin, dims);
    for (int la = 0; la < dims.w_lat; ++la)
        for (int lo = 0; lo < dims.w_lon; ++lo)
            for (int t = 0; t < dims.len; ++t)
                s.at(la, lo, t) =
                    double(field.at(origin.lon + lo, origin.lat + la, origin.t + t));
    return s;
}

Sequence3D extract_sequence(const FatalityField& field, const ActiveZone& zone, int t_start,
                            int t_end) {
    if (t_start > t_end) throw ValidationError("extract_sequence: t_start > t_end");
    Origin3 origin{zone.bbox.lat_min, zone.bbox.lon_min, t_start};
    Dims3 dims{zone.bbox.n_lat(), zone.bbox.n_lon(), t_end - t_start + 1};
    return extract_box(field, origin, dims);
}

DensityCube to_density_cube(const Sequence3D& seq, CoordMode mode) {
    double total = seq.total();
    if (total <= 0.0)
        throw ValidationError("to_density_cube: all-zero sequence cannot be normalized");
    DensityCube cube;
    cube.source_dims = seq.dims;
    cube.coords = mode;
    auto axis = [&](int idx, int n) {
        if (mode == CoordMode::raw) return double(idx);
        return n <= 1 ? 0.0 : double(idx) / double(n - 1);
    };
    for (int la = 0; la < seq.dims.w_lat; ++la) {
        for (int lo = 0; lo < seq.dims.w_lon; ++lo) {
            for (int t = 0; t < seq.dims.len; ++t) {
                double v = seq.at(la, lo, t);
                if (v == 0.0) continue;
                CubePoint p;
                p.u_lon = axis(lo, seq.dims.w_lon);
                p.u_lat = axis(la, seq.dims.w_lat);
                p.u_t = axis(t, seq.dims.len);
                p.weight = v / total;
                cube.points.push_back(p);
            }
        }
    }
    cube.n_active = int(cube.points.size());
    return cube;
}

DensityCube rotate90(const DensityCube& cube, int k) {
    k = ((k % 4) + 4) % 4;
    DensityCube out = cube;
    for (int turn = 0; turn < k; ++turn) {
        double lon_extent = 1.0;
        if (out.coords == CoordMode::raw)
            lon_extent = double(out.source_dims.w_lon - 1);
        for (auto& p : out.points) {
            double u_lon = p.u_lon, u_lat = p.u_lat;
            p.u_lon = u_lat;
            p.u_lat = lon_extent - u_lon;
        }
        std::swap(out.source_dims.w_lat, out.source_dims.w_lon);
    }
    return out;
}

Sequence3D rotate_sequence90(const Sequence3D& seq, int k) {
    k = ((k % 4) + 4) % 4;
    Sequence3D cur = seq;
    for (int turn = 0; turn < k; ++turn) {
        Dims3 nd{cur.dims.w_lon, cur.dims.w_lat, cur.dims.len};
        Sequence3D next = Sequence3D::zeros(cur.origin, nd);
        // Matches the cube map (u_lon,u_lat)->(u_lat,1-u_lon):
        // cell (la,lo) lands at (w_lon-1-lo, la).
        for (int la = 0; la < cur.dims.w_lat; ++la)
            for (int lo = 0; lo < cur.dims.w_lon; ++lo)
                for (int t = 0; t < cur.dims.len; ++t)
                    next.at(cur.dims.w_lon - 1 - lo, la, t) = cur.at(la, lo, t);
        cur = std::move(next);
    }
    return cur;
}

void dump_cube_csv(const DensityCube& cube, const std::filesystem::path& path) {
    csv::Writer w(path);
    w.row({"u_lon", "u_lat", "u_t", "weight"});
    for (const auto& p : cube.points)
        w.row({csv::format_full(p.u_lon), csv::format_full(p.u_lat), csv::format_full(p.u_t),
               csv::format_full(p.weight)});
    w.close();
}

}  // namespace shapecast
