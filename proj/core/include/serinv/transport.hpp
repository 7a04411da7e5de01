#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "serinv/block.hpp"

namespace serinv {

struct TransportConfig {
    std::chrono::milliseconds timeout{120000};
    std::size_t channel_capacity = 64;

    // Defaults overridden by SERINV_TIMEOUT_MS and SERINV_CHANNEL_CAPACITY.
    static TransportConfig from_env();
};

// Rank-private endpoint of a group of ranks. Messages between a pair of
// ranks are delivered in order and matched by tag.
class Communicator {
  public:
    virtual ~Communicator() = default;

    virtual int rank() const = 0;
    virtual int size() const = 0;

    virtual void send(int dst, std::uint64_t tag, std::vector<Block> payload) = 0;
    virtual std::vector<Block> recv(int src, std::uint64_t tag) = 0;

    // Collective. Ranks [0, count) receive a communicator over themselves with
    // unchanged rank numbers; the others receive nullptr.
    virtual std::unique_ptr<Communicator> split(int count) = 0;

    // Tag for the next collective. Every rank calls collectives in the same
    // order, so the sequences stay aligned.
    std::uint64_t next_tag() { return ++sequence_; }

  private:
    std::uint64_t sequence_ = 0;
};

// Elementwise sum at root, accumulated in rank order 0, 1, ..., P-1.
// Non-root ranks receive an empty block.
Block reduce_sum(Communicator& comm, const Block& mine, int root = 0);

// Root receives every rank's list, indexed by rank. Others receive {}.
std::vector<std::vector<Block>> gather_blocks(Communicator& comm, std::vector<Block> mine,
                                              int root = 0);

// Root supplies one list per rank; every rank returns its own list.
std::vector<Block> scatter_blocks(Communicator& comm, std::vector<std::vector<Block>> per_rank,
                                  int root = 0);

void barrier(Communicator& comm);

// Runs body on `size` concurrent ranks over fresh in-process channels and
// joins them. If any rank throws, the others are released with
// TransportFailure and the originating exception is rethrown.
void run_in_process(int size, const std::function<void(Communicator&)>& body,
                    const TransportConfig& config = TransportConfig::from_env());

#ifdef SERINV_HAVE_MPI
// Holds MPI initialization for the lifetime of the object.
class MpiSession {
  public:
    MpiSession(int* argc, char*** argv);
    ~MpiSession();
    MpiSession(const MpiSession&) = delete;
    MpiSession& operator=(const MpiSession&) = delete;

    // Communicator over MPI_COMM_WORLD.
    std::unique_ptr<Communicator> world() const;
};
#endif

}  // namespace serinv
