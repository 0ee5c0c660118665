#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ymflow/mesh.hpp"

namespace ymflow {

struct GeneralizedYoungMeasure;

// --out wins, then $YMFLOW_OUT, then the config's output entry.
std::filesystem::path output_root(const std::string& flag, const std::string& config_output);

// CSV with a leading "# config_hash=..." line; numbers rendered with %.17g.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& hash, const std::vector<std::string>& header);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(const std::string& s);
    void end_row();

private:
    std::ofstream out_;
    bool first_ = true;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
void write_field(const std::filesystem::path& path, const std::string& hash, const std::vector<const ScalarField*>& fields);
void write_measure(const std::filesystem::path& path, const std::string& hash, const GeneralizedYoungMeasure& m);

// reads a CSV written by CsvWriter: header + numeric rows (non-numeric cells become NaN)
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    int column(const std::string& name) const;
};
CsvTable read_csv(const std::filesystem::path& path);

}  // namespace ymflow
