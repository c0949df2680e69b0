#include "schedpred/instance_io.hpp"

#include "schedpred/errors.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string_view>

namespace schedpred {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::map<std::string, std::string> parse_header(std::string_view line) {
    std::map<std::string, std::string> kv;
    std::istringstream in{std::string(line)};
    std::string token;
    while (in >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) continue;
        kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return kv;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw InvalidInstance("instance line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

void write_instance(std::ostream& os, const Instance& instance) {
    const Parameters& p = instance.params();
    os << "# alpha=" << p.alpha().str() << " w0=" << p.w0().str() << " w1=" << p.w1().str();
    if (const auto& m = instance.model()) {
        os << " rho=" << m->rho().str() << " eps0=" << m->eps0().str() << " eps1=" << m->eps1().str();
    }
    os << " mode=" << (instance.mode() == PredictionMode::Binary ? "binary" : "probabilistic") << '\n';
    os << "# id,true_type,prediction,release_time\n";
    for (const Job& job : instance.jobs()) {
        os << job.id << ',' << as_int(job.true_type) << ',';
        if (job.has_label()) {
            os << as_int(job.label());
        } else {
            os << job.probability().str();
        }
        os << ',' << job.release_time.str() << '\n';
    }
}

Instance read_instance(std::istream& is) {
    std::map<std::string, std::string> header;
    std::vector<Job> jobs;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(is, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            auto kv = parse_header(line.substr(1));
            header.insert(kv.begin(), kv.end());
            continue;
        }
        std::vector<std::string> fields;
        std::string field;
        std::istringstream row{std::string(line)};
        while (std::getline(row, field, ',')) fields.emplace_back(trim(field));
        if (fields.size() != 4) fail(line_no, "expected 4 comma-separated fields, got " + std::to_string(fields.size()));
        try {
            Job job;
            job.id = static_cast<JobId>(std::stoul(fields[0]));
            job.true_type = job_type_from_int(std::stoi(fields[1]));
            const auto mode = header.count("mode") ? header.at("mode") : std::string("binary");
            if (mode == "binary") {
                job.prediction = job_type_from_int(std::stoi(fields[2]));
            } else if (mode == "probabilistic") {
                job.prediction = Rational::parse(fields[2]);
            } else {
                fail(line_no, "unknown mode '" + mode + "'");
            }
            job.release_time = Rational::parse(fields[3]);
            jobs.push_back(std::move(job));
        } catch (const InvalidInstance&) {
            throw;
        } catch (const std::exception& e) {
            fail(line_no, e.what());
        }
    }

    const auto need = [&](const char* key) -> Rational {
        auto it = header.find(key);
        if (it == header.end()) throw InvalidInstance(std::string("instance header is missing '") + key + "'");
        return Rational::parse(it->second);
    };
    Parameters params(need("alpha"), need("w0"), need("w1"));
    std::optional<PredictionModel> model;
    if (header.count("rho") || header.count("eps0") || header.count("eps1")) {
        model.emplace(need("rho"), need("eps0"), need("eps1"));
    }
    return Instance(std::move(jobs), params, std::move(model));
}

std::string to_text(const Instance& instance) {
    std::ostringstream os;
    write_instance(os, instance);
    return os.str();
}

Instance from_text(const std::string& text) {
    std::istringstream is(text);
    return read_instance(is);
}

}  // namespace schedpred
