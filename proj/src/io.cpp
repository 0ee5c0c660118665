#include "ymflow/io.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "ymflow/young_measure.hpp"

namespace ymflow {

namespace fs = std::filesystem;

fs::path output_root(const std::string& flag, const std::string& config_output) {
    if (!flag.empty()) return flag;
    if (const char* e = std::getenv("YMFLOW_OUT"); e && *e) return e;
    return config_output;
}

CsvWriter::CsvWriter(const fs::path& path, const std::string& hash, const std::vector<std::string>& header) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    out_.open(path, std::ios::binary);
    if (!out_) throw Rejected("cannot write '" + path.string() + "'");
    out_ << "# config_hash=" << hash << "\n";
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << "\n";
}

CsvWriter& CsvWriter::cell(double v) { return cell(fmt17(v)); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

CsvWriter& CsvWriter::cell(const std::string& s) {
    if (!first_) out_ << ",";
    out_ << s;
    first_ = false;
    return *this;
}

void CsvWriter::end_row() {
    out_ << "\n";
    first_ = true;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Rejected("cannot write '" + path.string() + "'");
    out << j.dump(2) << "\n";
}

void write_field(const fs::path& path, const std::string& hash, const std::vector<const ScalarField*>& fields) {
    CsvWriter w(path, hash, {"t", "i", "j", "x", "y", "u"});
    for (const ScalarField* f : fields) {
        const Grid& g = f->grid;
        for (int j = 0; j < g.ny(); ++j)
            for (int i = 0; i < g.nx(); ++i) {
                const Vec2 x = g.node(i, j);
                w.cell(f->t).cell(static_cast<long long>(i)).cell(static_cast<long long>(j)).cell(x[0]).cell(x[1]);
                w.cell(f->at(i, j));
                w.end_row();
            }
    }
}

void write_measure(const fs::path& path, const std::string& hash, const GeneralizedYoungMeasure& m) {
    CsvWriter w(path, hash, {"site", "part", "bin", "mass", "atom_x", "atom_y", "lambda"});
    auto rows = [&](long long site, const char* part, const Histogram& h, double lam) {
        for (const auto& e : h) {
            w.cell(site).cell(std::string(part)).cell(static_cast<long long>(e.bin)).cell(e.mass).cell(e.atom[0]).cell(e.atom[1]).cell(lam);
            w.end_row();
        }
    };
    for (std::size_t f = 0; f < m.nu.size(); ++f) {
        rows(static_cast<long long>(f), "nu", m.nu[f], m.lambda[f]);
        if (m.lambda[f] > 0.0) rows(static_cast<long long>(f), "nu_inf", m.nu_inf[f], m.lambda[f]);
    }
    for (std::size_t k = 0; k < m.lambda_b.size(); ++k)
        if (m.lambda_b[k] > 0.0) rows(static_cast<long long>(m.bsites[k].face), "boundary", m.nu_inf_b[k], m.lambda_b[k]);
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t k = 0; k < header.size(); ++k)
        if (header[k] == name) return static_cast<int>(k);
    return -1;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Rejected("cannot read '" + path.string() + "'");
    CsvTable t;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> v;
        std::stringstream ss(s);
        std::string c;
        while (std::getline(ss, c, ',')) v.push_back(c);
        return v;
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.header.empty()) {
            t.header = split(line);
            continue;
        }
        std::vector<double> row;
        for (const auto& c : split(line)) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            row.push_back(end && *end == '\0' && !c.empty() ? v : std::numeric_limits<double>::quiet_NaN());
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace ymflow
