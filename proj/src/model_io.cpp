#include "sdd/model_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace sdd {

namespace {

void write_exact(std::ofstream& out, const void* data, std::size_t bytes) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
    if (!out) throw std::runtime_error("save_model: write failed");
}

void read_exact(std::ifstream& in, void* data, std::size_t bytes) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
    if (in.gcount() != static_cast<std::streamsize>(bytes))
        throw std::runtime_error("load_model: truncated file");
}

}  // namespace

void save_model(const std::string& path, const QNetwork<float>& net, const ModelMeta& meta) {
    nlohmann::json header;
    header["format"] = "sdd-qnet-v1";
    header["widths"] = net.widths();
    header["seed"] = meta.seed;
    header["config_hash"] = meta.config_hash;
    header["scenario"] = meta.scenario_json;
    const std::string text = header.dump();

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_model: cannot open " + path);
    const std::uint32_t header_bytes = static_cast<std::uint32_t>(text.size());
    write_exact(out, &header_bytes, sizeof header_bytes);
    write_exact(out, text.data(), text.size());
    for (std::size_t l = 0; l < net.W.size(); ++l) {
        write_exact(out, net.W[l].data(),
                    static_cast<std::size_t>(net.W[l].size()) * sizeof(float));
        write_exact(out, net.b[l].data(),
                    static_cast<std::size_t>(net.b[l].size()) * sizeof(float));
    }
    out.flush();
    if (!out) throw std::runtime_error("save_model: write failed");
}

ModelFile load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_model: cannot open " + path);
    std::uint32_t header_bytes = 0;
    read_exact(in, &header_bytes, sizeof header_bytes);
    if (header_bytes == 0 || header_bytes > (1u << 20))
        throw std::runtime_error("load_model: implausible header size");
    std::string text(header_bytes, '\0');
    read_exact(in, text.data(), header_bytes);

    ModelFile file;
    try {
        const nlohmann::json header = nlohmann::json::parse(text);
        if (header.at("format").get<std::string>() != "sdd-qnet-v1")
            throw std::runtime_error("load_model: unknown format");
        file.meta.widths = header.at("widths").get<std::vector<int>>();
        file.meta.seed = header.at("seed").get<std::uint64_t>();
        file.meta.config_hash = header.at("config_hash").get<std::string>();
        file.meta.scenario_json = header.at("scenario").get<std::string>();
        file.net = QNetwork<float>(file.meta.widths, 0);
    } catch (const std::runtime_error&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("load_model: malformed header: ") + e.what());
    }
    for (std::size_t l = 0; l < file.net.W.size(); ++l) {
        read_exact(in, file.net.W[l].data(),
                   static_cast<std::size_t>(file.net.W[l].size()) * sizeof(float));
        read_exact(in, file.net.b[l].data(),
                   static_cast<std::size_t>(file.net.b[l].size()) * sizeof(float));
    }
    char extra = 0;
    if (in.read(&extra, 1); in.gcount() != 0)
        throw std::runtime_error("load_model: trailing bytes");
    return file;
}

}  // namespace sdd
