#include "lumen_cli/mesh.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "lumen/error.hpp"

namespace lumen::cli {

void write_obj(const Reflector& r, const SphericalGrid& grid, const std::filesystem::path& path)
{
    std::unique_ptr<std::FILE, int (*)(std::FILE*)> out(std::fopen(path.string().c_str(), "w"), &std::fclose);
    if (!out)
        throw Error(ErrorCode::Io, "mesh: cannot open " + path.string() + " for writing");
    std::FILE* f = out.get();
    const auto nodes = grid.nodes();
    const auto tris = grid.triangles();
    std::fprintf(f, "# lumen reflector mesh\n# vertices %zu faces %zu atoms %zu\n", nodes.size(), tris.size(),
                 r.size());
    for (const Vec3& x : nodes) {
        const EnvelopePoint p = r.radius(x);
        const Vec3 y = p.rho * x;
        std::fprintf(f, "v %.17g %.17g %.17g\n#@atom %zu\n", y.x, y.y, y.z, p.winner);
    }
    for (const auto& t : tris)
        std::fprintf(f, "f %u %u %u\n", t[0] + 1, t[1] + 1, t[2] + 1);
    if (std::ferror(f) || std::fflush(f) != 0)
        throw Error(ErrorCode::Io, "mesh: write failed for " + path.string());
}

Mesh read_obj(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::Io, "mesh: cannot read " + path.string());
    Mesh mesh;
    std::string line;
    std::size_t row = 0;
    auto bad = [&] { throw Error(ErrorCode::Io, "mesh: malformed line " + std::to_string(row) + " in " + path.string()); };
    while (std::getline(in, line)) {
        ++row;
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            if (!(ss >> v.x >> v.y >> v.z))
                bad();
            mesh.vertices.push_back(v);
        } else if (tag == "#@atom") {
            std::size_t a = 0;
            if (!(ss >> a) || mesh.atoms.size() + 1 != mesh.vertices.size())
                bad();
            mesh.atoms.push_back(a);
        } else if (tag == "f") {
            std::array<std::uint32_t, 3> t{};
            for (auto& k : t) {
                if (!(ss >> k) || k == 0)
                    bad();
                --k;
            }
            mesh.faces.push_back(t);
        }
    }
    if (mesh.atoms.size() != mesh.vertices.size())
        throw Error(ErrorCode::Io, "mesh: vertex and atom counts differ in " + path.string());
    for (const auto& t : mesh.faces)
        for (auto k : t)
            if (k >= mesh.vertices.size())
                throw Error(ErrorCode::Io, "mesh: face index out of range in " + path.string());
    return mesh;
}

} // namespace lumen::cli
