#include "serinv/transport.hpp"

#include <cstdlib>
#include <string>

#include "serinv/error.hpp"

namespace serinv {

TransportConfig TransportConfig::from_env() {
    TransportConfig c;
    if (const char* v = std::getenv("SERINV_TIMEOUT_MS"); v && *v) {
        c.timeout = std::chrono::milliseconds(std::stoll(v));
    }
    if (const char* v = std::getenv("SERINV_CHANNEL_CAPACITY"); v && *v) {
        auto cap = std::stoull(v);
        c.channel_capacity = cap > 0 ? cap : 1;
    }
    return c;
}

Block reduce_sum(Communicator& comm, const Block& mine, int root) {
    const auto tag = comm.next_tag();
    if (comm.rank() != root) {
        comm.send(root, tag, {mine});
        return Block();
    }
    std::vector<Block> parts(static_cast<std::size_t>(comm.size()));
    for (int r = 0; r < comm.size(); ++r) {
        if (r == root) {
            parts[static_cast<std::size_t>(r)] = mine;
            continue;
        }
        auto msg = comm.recv(r, tag);
        if (msg.size() != 1) {
            throw Error(Errc::ShapeMismatch, "reduce_sum expects one block per rank");
        }
        parts[static_cast<std::size_t>(r)] = std::move(msg.front());
    }
    Block sum = parts.front();
    for (std::size_t r = 1; r < parts.size(); ++r) {
        if (!parts[r].same_shape(sum)) {
            throw Error(Errc::ShapeMismatch,
                        "reduce_sum: rank " + std::to_string(r) + " sent a block of another shape");
        }
        auto dst = sum.values();
        auto src = parts[r].values();
        for (std::size_t k = 0; k < dst.size(); ++k) {
            dst[k] += src[k];
        }
    }
    return sum;
}

std::vector<std::vector<Block>> gather_blocks(Communicator& comm, std::vector<Block> mine,
                                              int root) {
    const auto tag = comm.next_tag();
    if (comm.rank() != root) {
        comm.send(root, tag, std::move(mine));
        return {};
    }
    std::vector<std::vector<Block>> all(static_cast<std::size_t>(comm.size()));
    for (int r = 0; r < comm.size(); ++r) {
        all[static_cast<std::size_t>(r)] = r == root ? std::move(mine) : comm.recv(r, tag);
    }
    return all;
}

std::vector<Block> scatter_blocks(Communicator& comm, std::vector<std::vector<Block>> per_rank,
                                  int root) {
    const auto tag = comm.next_tag();
    if (comm.rank() != root) {
        return comm.recv(root, tag);
    }
    if (per_rank.size() != static_cast<std::size_t>(comm.size())) {
        throw Error(Errc::ShapeMismatch, "scatter_blocks needs one list per rank");
    }
    for (int r = 0; r < comm.size(); ++r) {
        if (r != root) {
            comm.send(r, tag, std::move(per_rank[static_cast<std::size_t>(r)]));
        }
    }
    return std::move(per_rank[static_cast<std::size_t>(root)]);
}

void barrier(Communicator& comm) {
    if (comm.size() == 1) {
        return;
    }
    gather_blocks(comm, {});
    std::vector<std::vector<Block>> empty;
    if (comm.rank() == 0) {
        empty.resize(static_cast<std::size_t>(comm.size()));
    }
    scatter_blocks(comm, std::move(empty));
}

}  // namespace serinv
