#include "finsler/database.hpp"

#include "finsler/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace finsler {

namespace {

std::string hex(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string g17(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

std::string format_record(const ModelManifold& man, const GeodesicRecord& rec)
{
    std::string s = hex(man.hash());
    s += '\t' + rec.provenance;
    s += '\t' + rec.cls.str();
    s += '\t' + g17(rec.length);
    s += '\t' + g17(rec.energy);
    s += '\t' + (rec.index_degenerate ? std::string("?") : std::to_string(rec.index));
    s += '\t' + std::to_string(rec.path.k());
    s += '\t';
    for (std::size_t i = 0; i < rec.path.nodes.size(); ++i)
        for (int c = 0; c < 4; ++c) {
            if (i || c) s += ' ';
            s += g17(rec.path.nodes[i](c));
        }
    return s;
}

GeodesicRecord parse_record(const ModelManifold& man, const std::string& line)
{
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, '\t');) f.push_back(tok);
    if (f.size() != 8) throw ConfigError("database line has " + std::to_string(f.size()) + " fields, expected 8");
    if (f[0] != hex(man.hash())) throw ConfigError("database record belongs to another model");
    GeodesicRecord rec;
    rec.provenance = f[1];
    rec.cls = HomotopyClass::parse(f[2]);
    try {
        rec.length = std::stod(f[3]);
        rec.energy = std::stod(f[4]);
        rec.index_degenerate = f[5] == "?";
        rec.index = rec.index_degenerate ? 0 : std::stoi(f[5]);
        const int k = std::stoi(f[6]);
        std::stringstream ns(f[7]);
        std::vector<ChartPoint> nodes(static_cast<std::size_t>(k) + 1);
        for (auto& x : nodes)
            for (int c = 0; c < 4; ++c) {
                std::string tok;
                if (!(ns >> tok)) throw ConfigError("database record has too few node coordinates");
                x(c) = std::stod(tok);
            }
        std::string extra;
        if (ns >> extra) throw ConfigError("database record has too many node coordinates");
        rec.path = make_path(man, std::move(nodes));
    } catch (const std::logic_error&) {
        throw ConfigError("malformed number in database record");
    }
    return rec;
}

void GeodesicDatabase::append(const ModelManifold& man, const std::vector<GeodesicRecord>& records) const
{
    std::ofstream out(path_, std::ios::app);
    if (!out) throw ConfigError("cannot open database " + path_);
    for (const auto& r : records) out << format_record(man, r) << '\n';
}

std::vector<GeodesicRecord> GeodesicDatabase::load(const ModelManifold& man) const
{
    std::ifstream in(path_);
    if (!in) throw ConfigError("cannot read database " + path_);
    const std::string tag = hex(man.hash()) + '\t';
    std::vector<GeodesicRecord> out;
    for (std::string line; std::getline(in, line);) {
        if (line.empty() || line[0] == '#' || line.compare(0, tag.size(), tag) != 0) continue;
        out.push_back(parse_record(man, line));
    }
    return out;
}

std::vector<GeodesicRecord> deduplicate(std::vector<GeodesicRecord> records, double tol)
{
    std::vector<GeodesicRecord> out;
    for (auto& r : records) {
        bool seen = false;
        for (const auto& o : out)
            if (o.cls == r.cls && std::abs(o.energy - r.energy) <= tol * (1.0 + std::abs(o.energy))) {
                seen = true;
                break;
            }
        if (!seen) out.push_back(std::move(r));
    }
    return out;
}

} // namespace finsler
