#include <svreg/io.hpp>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <openssl/evp.h>

namespace svreg::io {
namespace {

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_line(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<Index> index_list(const json& arr, const char* what)
{
    if (!arr.is_array()) throw DataError(std::string(what) + " must be an array of 1-based indices");
    std::vector<Index> out;
    for (const auto& v : arr) {
        if (!v.is_number_integer() || v.get<long long>() < 1) {
            throw DataError(std::string(what) + " contains a non-positive or non-integer index");
        }
        out.push_back(static_cast<Index>(v.get<long long>() - 1));
    }
    return out;
}

json one_based(const std::vector<Index>& v)
{
    json a = json::array();
    for (Index i : v) a.push_back(i + 1);
    return a;
}

json vec_json(const Vector& v)
{
    json a = json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vector vec_from(const json& a, const char* what)
{
    if (!a.is_array()) throw DataError(std::string(what) + " must be an array");
    Vector v(static_cast<Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Index>(i)) = a[i].get<double>();
    return v;
}

std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

Table read_csv(const fs::path& path)
{
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    Table t;
    std::string line;
    long lineno = 0;
    std::vector<double> values;
    Index rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto fields = split_line(line);
        if (t.header.empty()) {
            for (auto& f : fields) t.header.push_back(trim(f));
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.header.size())
                            + " fields, found " + std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string f = trim(fields[c]);
            double v = 0.0;
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
                throw DataError(path.string() + ":" + std::to_string(lineno) + ": column " + std::to_string(c + 1)
                                + ": '" + f + "' is not a finite number");
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (t.header.empty()) throw DataError(path.string() + ": missing header row");
    const auto cols = static_cast<Index>(t.header.size());
    t.values.resize(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        for (Index j = 0; j < cols; ++j) t.values(i, j) = values[i * cols + j];
    }
    return t;
}

std::string csv_text(const std::vector<std::string>& header, const Matrix& values)
{
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) out += (c ? "," : "") + header[c];
    out += "\n";
    for (Index i = 0; i < values.rows(); ++i) {
        for (Index j = 0; j < values.cols(); ++j) out += (j ? "," : "") + num(values(i, j));
        out += "\n";
    }
    return out;
}

Dataset read_dataset(const fs::path& x, const fs::path& z, const fs::path& y)
{
    const Table tx = read_csv(x), tz = read_csv(z), ty = read_csv(y);
    if (ty.values.cols() != 1) throw DataError(y.string() + ": expected a single response column");
    if (tx.values.rows() != ty.values.rows() || tz.values.rows() != ty.values.rows()) {
        throw DataError("row counts differ: X " + std::to_string(tx.values.rows()) + ", Z "
                        + std::to_string(tz.values.rows()) + ", y " + std::to_string(ty.values.rows()));
    }
    Dataset d;
    d.X = tx.values;
    d.Z = tz.values;
    d.y = ty.values.col(0);
    d.x_names = tx.header;
    d.z_names = tz.header;
    d.fill_metadata();
    d.validate();
    return d;
}

void write_dataset(const fs::path& dir, const Dataset& d)
{
    Dataset named = d;
    named.fill_metadata();
    write_text(dir / "X.csv", csv_text(named.x_names, named.X));
    write_text(dir / "Z.csv", csv_text(named.z_names, named.Z));
    write_text(dir / "y.csv", csv_text({"y"}, named.y));
}

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed for " + path.string());
}

json read_json(const fs::path& path)
{
    try {
        return json::parse(read_text(path));
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

void write_json(const fs::path& path, const json& j)
{
    write_text(path, j.dump(2) + "\n");
}

json groups_to_json(const GroupSpec& gs)
{
    json j;
    j["predictor_groups"] = json::array();
    for (const auto& g : gs.predictor_groups) j["predictor_groups"].push_back(one_based(g));
    j["modifier_groups"] = json::array();
    for (const auto& g : gs.modifier_groups) j["modifier_groups"].push_back(one_based(g));
    return j;
}

GroupSpec groups_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("predictor_groups") || !j.contains("modifier_groups")) {
        throw DataError("groups file needs 'predictor_groups' and 'modifier_groups'");
    }
    GroupSpec gs;
    for (const auto& g : j.at("predictor_groups")) gs.predictor_groups.push_back(index_list(g, "predictor group"));
    for (const auto& g : j.at("modifier_groups")) gs.modifier_groups.push_back(index_list(g, "modifier group"));
    return gs;
}

json truth_to_json(const SelectionTruth& t)
{
    json j;
    std::vector<Index> mains;
    for (std::size_t i = 0; i < t.main_relevant.size(); ++i) {
        if (t.main_relevant[i]) mains.push_back(static_cast<Index>(i));
    }
    j["p"] = t.main_relevant.size();
    j["K"] = t.interaction_relevant.cols();
    j["relevant_main"] = one_based(mains);
    j["relevant_interactions"] = json::array();
    for (Index r = 0; r < t.interaction_relevant.rows(); ++r) {
        for (Index k = 0; k < t.interaction_relevant.cols(); ++k) {
            if (t.interaction_relevant(r, k)) j["relevant_interactions"].push_back({r + 1, k + 1});
        }
    }
    return j;
}

SelectionTruth truth_from_json(const json& j)
{
    try {
        const auto p = j.at("p").get<Index>();
        const auto K = j.at("K").get<Index>();
        SelectionTruth t;
        t.main_relevant.assign(p, false);
        t.interaction_relevant = BoolMatrix::Constant(p, K, false);
        for (Index m : index_list(j.at("relevant_main"), "relevant_main")) {
            if (m >= p) throw DataError("relevant_main index exceeds p");
            t.main_relevant[m] = true;
        }
        for (const auto& pair : j.at("relevant_interactions")) {
            const auto ix = index_list(pair, "relevant interaction");
            if (ix.size() != 2 || ix[0] >= p || ix[1] >= K) throw DataError("bad relevant interaction entry");
            t.interaction_relevant(ix[0], ix[1]) = true;
        }
        t.validate();
        return t;
    } catch (const json::exception& e) {
        throw DataError(std::string("truth file: ") + e.what());
    }
}

json coefficients_to_json(const CoefficientSet& c)
{
    json j;
    j["beta0"] = c.beta0;
    j["theta0"] = vec_json(c.theta0);
    j["beta"] = vec_json(c.beta);
    j["theta"] = json::array();
    for (Index r = 0; r < c.theta.rows(); ++r) j["theta"].push_back(vec_json(c.theta.row(r).transpose()));
    return j;
}

CoefficientSet coefficients_from_json(const json& j)
{
    try {
        CoefficientSet c;
        c.beta0 = j.at("beta0").get<double>();
        c.theta0 = vec_from(j.at("theta0"), "theta0");
        c.beta = vec_from(j.at("beta"), "beta");
        const auto& th = j.at("theta");
        c.theta.resize(c.beta.size(), c.theta0.size());
        if (static_cast<Index>(th.size()) != c.beta.size()) throw DataError("theta has the wrong number of rows");
        for (std::size_t r = 0; r < th.size(); ++r) {
            const Vector row = vec_from(th[r], "theta row");
            if (row.size() != c.theta0.size()) throw DataError("theta row has the wrong length");
            c.theta.row(static_cast<Index>(r)) = row.transpose();
        }
        return c;
    } catch (const json::exception& e) {
        throw DataError(std::string("coefficient file: ") + e.what());
    }
}

json fit_to_json(const FitResult& fit, const CoefficientSet& original, const FitConfig& cfg, Method method)
{
    json j;
    j["method"] = to_string(method);
    j["lambda"] = fit.lambda;
    j["alpha"] = cfg.alpha;
    j["weight_mode"] = to_string(cfg.weight_mode);
    j["converged"] = fit.converged;
    j["n_outer_iterations"] = fit.n_outer_iterations;
    j["final_objective"] = fit.final_objective();
    j["objective_trace"] = fit.objective_trace;
    j["coefficients_standardized"] = coefficients_to_json(fit.coefficients);
    j["coefficients_original"] = coefficients_to_json(original);
    j["active_groups"] = one_based(fit.active_groups);
    j["active_modifier_blocks"] = json::array();
    for (const auto& [g, m] : fit.active_modifier_blocks) j["active_modifier_blocks"].push_back({g + 1, m + 1});
    j["screened_groups"] = one_based(fit.screened_groups);
    j["warnings"] = fit.warnings;
    return j;
}

json cv_to_json(const CVResult& cv)
{
    json j;
    j["method"] = to_string(cv.method);
    j["folds"] = cv.folds;
    j["seed"] = cv.seed;
    j["lambdas"] = cv.lambdas;
    j["mean_mse"] = cv.mean_mse;
    j["fold_mse"] = json::array();
    for (Index v = 0; v < cv.fold_mse.rows(); ++v) j["fold_mse"].push_back(vec_json(cv.fold_mse.row(v).transpose()));
    j["fold_sizes"] = cv.fold_sizes;
    json folds = json::array();
    for (int f : cv.fold_of_row) folds.push_back(f + 1);
    j["fold_of_row"] = folds;
    j["best_index"] = cv.best_index;
    j["best_lambda"] = cv.best_lambda;
    return j;
}

std::string sha256_hex(const std::string& bytes)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error("SHA-256 digest failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 15]);
    }
    return out;
}

std::string sha256_file(const fs::path& path)
{
    return sha256_hex(read_text(path));
}

void write_manifest(
    const fs::path& dir,
    const std::string& command,
    const json& config,
    const std::vector<fs::path>& inputs,
    const std::vector<fs::path>& outputs
)
{
    json m;
    m["command"] = command;
    m["config"] = config;
    m["tool_version"] = kToolVersion;
    m["rng_algorithm"] = Rng::algorithm;
    m["timestamp"] = utc_now();
    m["inputs"] = json::object();
    for (const auto& p : inputs) m["inputs"][p.string()] = sha256_file(p);
    m["outputs"] = json::object();
    for (const auto& p : outputs) m["outputs"][p.filename().string()] = sha256_file(p);
    write_json(dir / "manifest.json", m);
}

} // namespace svreg::io
