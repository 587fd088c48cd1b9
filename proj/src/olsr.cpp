#include "meshsim/olsr.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace meshsim::olsr {

void Params::validate() const {
    for (double v : {hello_interval, hello_validity, tc_interval, tc_validity, mid_interval,
                     mid_validity, hna_interval, hna_validity, duplicate_hold})
        if (!(v > 0.0)) throw DomainError("olsr intervals and validity times must be > 0");
    if (tc_redundancy < 0 || tc_redundancy > 2) throw DomainError("TcRedundancy must be 0, 1 or 2");
    if (mpr_coverage < 1) throw DomainError("MprCoverage must be >= 1");
    if (link_quality_level != 0 && link_quality_level != 2)
        throw DomainError("LinkQualityLevel must be 0 or 2");
    if (link_quality_window < 1) throw DomainError("LinkQualityWinSize must be >= 1");
    if (!(hyst_scaling > 0.0 && hyst_scaling <= 1.0)) throw DomainError("HystScaling must lie in (0,1]");
    if (!(hyst_thr_low >= 0.0 && hyst_thr_low <= hyst_thr_high && hyst_thr_high <= 1.0))
        throw DomainError("hysteresis thresholds must satisfy 0 <= low <= high <= 1");
    if (willingness < kWillNever || willingness > kWillAlways)
        throw DomainError("willingness must lie in [0,7]");
}

std::string to_string(MsgType t) {
    switch (t) {
        case MsgType::Hello: return "HELLO";
        case MsgType::Tc: return "TC";
        case MsgType::Mid: return "MID";
        case MsgType::Hna: return "HNA";
    }
    return "?";
}

std::string to_string(LinkCode c) {
    switch (c) {
        case LinkCode::Asym: return "ASYM";
        case LinkCode::Sym: return "SYM";
        case LinkCode::MprNeigh: return "MPR";
        case LinkCode::Lost: return "LOST";
    }
    return "?";
}

namespace {

std::string num(double v) {
    if (std::isinf(v)) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

Time after(Time now, double seconds) { return now + Time::from_seconds(seconds); }

}  // namespace

std::string Message::dump() const {
    std::ostringstream os;
    os << to_string(type) << " orig=" << to_string(originator) << " seq=" << seq << " ttl=" << ttl
       << " hops=" << hop_count << " vtime=" << num(vtime);
    if (const auto* h = std::get_if<HelloBody>(&body)) {
        os << " htime=" << num(h->htime) << " will=" << h->willingness;
        for (const auto& b : h->blocks) {
            os << ' ' << to_string(b.code) << '[';
            for (std::size_t i = 0; i < b.neighbors.size(); ++i) {
                const auto& n = b.neighbors[i];
                os << (i ? " " : "") << to_string(n.address) << " lq=" << num(n.lq) << " etx=" << num(n.etx);
            }
            os << ']';
        }
    } else if (const auto* t = std::get_if<TcBody>(&body)) {
        os << " ansn=" << t->ansn << " adv[";
        for (std::size_t i = 0; i < t->neighbors.size(); ++i)
            os << (i ? " " : "") << to_string(t->neighbors[i].address) << " etx=" << num(t->neighbors[i].etx);
        os << ']';
    } else if (const auto* m = std::get_if<MidBody>(&body)) {
        os << " aliases[";
        for (std::size_t i = 0; i < m->addresses.size(); ++i)
            os << (i ? " " : "") << to_string(m->addresses[i]);
        os << ']';
    } else if (const auto* n = std::get_if<HnaBody>(&body)) {
        os << " nets[";
        for (std::size_t i = 0; i < n->networks.size(); ++i)
            os << (i ? " " : "") << to_string(n->networks[i].network) << '/'
               << to_string(n->networks[i].netmask);
        os << ']';
    }
    return os.str();
}

bool seq_newer(std::uint16_t a, std::uint16_t b) {
    return (a > b && a - b <= 32768) || (a < b && b - a > 32768);
}

double LinkTuple::lq() const {
    if (loss_window.empty()) return 0.0;
    auto got = std::count(loss_window.begin(), loss_window.end(), true);
    return static_cast<double>(got) / static_cast<double>(loss_window.size());
}

Metric LinkTuple::etx() const { return etx_from_ratios(lq(), std::clamp(nlq, 0.0, 1.0)); }

bool NodeState::link_symmetric(const LinkTuple& l, Time now) const {
    return l.sym_until > now && !l.pending;
}

bool NodeState::neighbor_symmetric(Address main, Time now) const {
    for (const auto& [addr, l] : links) {
        Address m = addr;
        if (auto it = mid.find(addr); it != mid.end()) m = it->second.main;
        if (m == main && link_symmetric(l, now)) return true;
    }
    return false;
}

std::vector<Address> NodeState::sym_neighbors(Time now) const {
    std::vector<Address> out;
    for (const auto& [addr, n] : neighbors)
        if (neighbor_symmetric(addr, now)) out.push_back(addr);
    return out;
}

LinkTuple hysteresis_update(LinkTuple link, LinkEvent ev, const Params& p) {
    double s = p.hyst_scaling;
    if (ev == LinkEvent::Received)
        link.quality = (1.0 - s) * link.quality + s;
    else
        link.quality = (1.0 - s) * link.quality;
    if (link.quality > p.hyst_thr_high)
        link.pending = false;
    else if (link.quality < p.hyst_thr_low)
        link.pending = true;
    return link;
}

namespace {

void record(LinkTuple& l, bool received, const Params& p) {
    l.loss_window.push_back(received);
    while (static_cast<int>(l.loss_window.size()) > p.link_quality_window) l.loss_window.pop_front();
    if (p.use_hysteresis)
        l = hysteresis_update(std::move(l), received ? LinkEvent::Received : LinkEvent::Lost, p);
}

void catch_up_losses(LinkTuple& l, const Params& p, Time now) {
    Time step = Time::from_seconds(l.htime);
    if (step.us <= 0) return;
    while (l.next_loss_deadline <= now && l.next_loss_deadline < l.expiry) {
        record(l, false, p);
        l.next_loss_deadline += step;
    }
}

Address main_of(const NodeState& s, Address iface) {
    if (auto it = s.mid.find(iface); it != s.mid.end()) return it->second.main;
    return iface;
}

void refresh_neighbors(NodeState& s, Time now) {
    std::map<Address, NeighborTuple> next;
    for (const auto& [addr, l] : s.links) {
        Address m = main_of(s, addr);
        auto& n = next[m];
        n.main = m;
        if (auto old = s.neighbors.find(m); old != s.neighbors.end()) n.willingness = old->second.willingness;
        if (s.link_symmetric(l, now)) n.status = NeighborStatus::Sym;
    }
    s.neighbors = std::move(next);
}

}  // namespace

void expire(NodeState& s, const Params& p, Time now) {
    for (auto& [addr, l] : s.links) catch_up_losses(l, p, now);
    std::erase_if(s.links, [&](const auto& kv) { return kv.second.expiry <= now; });
    refresh_neighbors(s, now);
    std::erase_if(s.two_hops, [&](const auto& kv) {
        return kv.second.expiry <= now || !s.neighbor_symmetric(kv.first.first, now);
    });
    std::erase_if(s.mpr_selectors, [&](const auto& kv) { return kv.second <= now; });
    std::erase_if(s.topology, [&](const auto& kv) { return kv.second.expiry <= now; });
    std::erase_if(s.duplicates, [&](const auto& kv) { return kv.second.expiry <= now; });
    std::erase_if(s.mid, [&](const auto& kv) { return kv.second.expiry <= now; });
    std::erase_if(s.hna, [&](const HnaTuple& h) { return h.expiry <= now; });
}

Message emit_hello(NodeState& s, const Params& p, Time now) {
    HelloBody body;
    body.htime = p.hello_interval;
    body.willingness = p.willingness;
    std::map<LinkCode, std::vector<HelloNeighbor>> groups;
    for (const auto& [addr, l] : s.links) {
        if (l.expiry <= now) continue;
        LinkCode code;
        if (s.link_symmetric(l, now))
            code = s.mprs.contains(main_of(s, addr)) ? LinkCode::MprNeigh : LinkCode::Sym;
        else if (l.asym_until > now && !l.pending)
            code = LinkCode::Asym;
        else
            code = LinkCode::Lost;
        groups[code].push_back({addr, l.lq(), l.etx().value()});
    }
    for (auto& [code, list] : groups) body.blocks.push_back({code, std::move(list)});

    Message m;
    m.type = MsgType::Hello;
    m.vtime = p.hello_validity;
    m.originator = s.main_address;
    m.ttl = 1;
    m.hop_count = 0;
    m.seq = ++s.msg_seq;
    m.body = std::move(body);
    ++s.counters.hello_sent;
    return m;
}

std::optional<Message> emit_tc(NodeState& s, const Params& p, Time now) {
    std::set<Address> adv;
    for (Address n : s.sym_neighbors(now)) {
        bool selector = s.mpr_selectors.contains(n);
        bool mpr = s.mprs.contains(n);
        if (p.tc_redundancy == 2 || selector || (p.tc_redundancy == 1 && mpr)) adv.insert(n);
    }
    if (adv != s.last_advertised) {
        ++s.ansn;
        s.last_advertised = adv;
    }
    if (adv.empty()) {
        if (s.ansn == 0) return std::nullopt;
        if (s.advertised_empty_since == Time::never()) s.advertised_empty_since = now;
        if (now >= after(s.advertised_empty_since, p.tc_validity)) return std::nullopt;
    } else {
        s.advertised_empty_since = Time::never();
    }

    TcBody body;
    body.ansn = s.ansn;
    for (Address n : adv) {
        auto it = s.links.find(n);
        double e = it != s.links.end() ? it->second.etx().value() : 1.0;
        body.neighbors.push_back({n, e});
    }
    Message m;
    m.type = MsgType::Tc;
    m.vtime = p.tc_validity;
    m.originator = s.main_address;
    m.ttl = 255;
    m.seq = ++s.msg_seq;
    m.body = std::move(body);
    ++s.counters.tc_sent;
    return m;
}

std::optional<Message> emit_mid(NodeState& s, const Params& p, Time) {
    if (!p.emit_mid || s.local_aliases.empty()) return std::nullopt;
    Message m;
    m.type = MsgType::Mid;
    m.vtime = p.mid_validity;
    m.originator = s.main_address;
    m.ttl = 255;
    m.seq = ++s.msg_seq;
    m.body = MidBody{s.local_aliases};
    ++s.counters.mid_sent;
    return m;
}

std::optional<Message> emit_hna(NodeState& s, const Params& p, Time) {
    if (s.local_hna.empty()) return std::nullopt;
    Message m;
    m.type = MsgType::Hna;
    m.vtime = p.hna_validity;
    m.originator = s.main_address;
    m.ttl = 255;
    m.seq = ++s.msg_seq;
    m.body = HnaBody{s.local_hna};
    ++s.counters.hna_sent;
    return m;
}

void process_hello(NodeState& s, const Params& p, const Message& m, Address from, Time now) {
    ++s.counters.received;
    const auto* body = std::get_if<HelloBody>(&m.body);
    if (m.type != MsgType::Hello || !body) {
        ++s.counters.malformed;
        return;
    }
    std::set<Address> seen;
    for (const auto& b : body->blocks)
        for (const auto& n : b.neighbors)
            if (!n.address || n.address == m.originator || !seen.insert(n.address).second) {
                ++s.counters.malformed;
                return;
            }

    auto [it, inserted] = s.links.try_emplace(from);
    LinkTuple& l = it->second;
    if (inserted) {
        l.local_iface = s.main_address;
        l.neighbor_iface = from;
        l.pending = p.use_hysteresis;
    } else {
        catch_up_losses(l, p, now);
    }
    l.htime = body->htime;
    record(l, true, p);
    l.next_loss_deadline = after(now, 1.5 * body->htime);
    l.asym_until = after(now, m.vtime);

    const HelloNeighbor* self = nullptr;
    LinkCode self_code = LinkCode::Asym;
    for (const auto& b : body->blocks)
        for (const auto& n : b.neighbors)
            if (n.address == s.main_address) {
                self = &n;
                self_code = b.code;
            }
    if (self) {
        if (self_code == LinkCode::Lost) {
            l.sym_until = now;
        } else {
            l.sym_until = after(now, m.vtime);
            l.nlq = self->lq;
        }
    }
    l.expiry = std::max(l.asym_until, l.sym_until);

    Address sender = main_of(s, from);
    refresh_neighbors(s, now);
    s.neighbors[sender].willingness = body->willingness;

    if (s.neighbor_symmetric(sender, now)) {
        for (const auto& b : body->blocks) {
            for (const auto& n : b.neighbors) {
                if (n.address == s.main_address) continue;
                auto key = std::make_pair(sender, main_of(s, n.address));
                if (b.code == LinkCode::Sym || b.code == LinkCode::MprNeigh)
                    s.two_hops[key] = {key.first, key.second, after(now, m.vtime), n.etx};
                else
                    s.two_hops.erase(key);
            }
        }
    }

    if (self && self_code == LinkCode::MprNeigh)
        s.mpr_selectors[sender] = after(now, m.vtime);
    else if (self)
        s.mpr_selectors.erase(sender);
}

std::optional<Message> process_flooded(NodeState& s, const Params& p, const Message& m, Address from,
                                       Time now) {
    ++s.counters.received;
    if (m.originator == s.main_address) return std::nullopt;
    Address sender = main_of(s, from);
    if (!s.neighbor_symmetric(sender, now)) return std::nullopt;

    auto key = std::make_pair(m.originator, m.seq);
    auto dup = s.duplicates.find(key);
    if (dup == s.duplicates.end()) {
        if (const auto* tc = std::get_if<TcBody>(&m.body); tc && m.type == MsgType::Tc) {
            bool stale = std::any_of(s.topology.begin(), s.topology.end(), [&](const auto& kv) {
                return kv.second.last == m.originator && seq_newer(kv.second.seq, tc->ansn);
            });
            if (stale) {
                ++s.counters.stale_tc;
            } else {
                std::erase_if(s.topology, [&](const auto& kv) {
                    return kv.second.last == m.originator && seq_newer(tc->ansn, kv.second.seq);
                });
                for (const auto& n : tc->neighbors) {
                    auto k = std::make_pair(n.address, m.originator);
                    s.topology[k] = {n.address, m.originator, tc->ansn, after(now, m.vtime), n.etx};
                }
            }
        } else if (const auto* mid = std::get_if<MidBody>(&m.body); mid && m.type == MsgType::Mid) {
            for (Address a : mid->addresses) s.mid[a] = {m.originator, after(now, m.vtime)};
        } else if (const auto* hna = std::get_if<HnaBody>(&m.body); hna && m.type == MsgType::Hna) {
            for (const auto& net : hna->networks) {
                auto h = std::find_if(s.hna.begin(), s.hna.end(), [&](const HnaTuple& t) {
                    return t.gateway == m.originator && t.net == net;
                });
                if (h != s.hna.end())
                    h->expiry = after(now, m.vtime);
                else
                    s.hna.push_back({m.originator, net, after(now, m.vtime)});
            }
        } else {
            ++s.counters.malformed;
            return std::nullopt;
        }
    } else {
        ++s.counters.duplicates;
        if (dup->second.retransmitted) return std::nullopt;
    }

    bool forward = m.ttl > 1;
    if (forward && p.mpr_flooding) {
        auto sel = s.mpr_selectors.find(sender);
        forward = sel != s.mpr_selectors.end() && sel->second > now;
    }
    auto& d = s.duplicates[key];
    d.expiry = after(now, p.duplicate_hold);
    d.retransmitted = d.retransmitted || forward;
    if (!forward) return std::nullopt;

    Message out = m;
    out.ttl -= 1;
    out.hop_count += 1;
    ++s.counters.forwarded;
    return out;
}

std::set<Address> select_mprs(NodeState& s, const Params& p, Time now) {
    std::vector<Address> sym = s.sym_neighbors(now);
    std::set<Address> sym_set(sym.begin(), sym.end());
    auto will = [&](Address n) {
        auto it = s.neighbors.find(n);
        return it == s.neighbors.end() ? kWillDefault : it->second.willingness;
    };

    std::map<Address, std::set<Address>> cover;  // two-hop -> covering neighbours
    std::set<Address> reachable;
    for (const auto& [key, t] : s.two_hops) {
        if (t.expiry <= now) continue;
        Address n = key.first;
        Address th = key.second;
        if (th == s.main_address || sym_set.contains(th) || !sym_set.contains(n)) continue;
        reachable.insert(th);
        if (will(n) != kWillNever) cover[th].insert(n);
    }
    for (Address th : reachable)
        if (!cover.contains(th)) ++s.counters.uncoverable;

    const std::size_t k = static_cast<std::size_t>(p.mpr_coverage);
    auto need = [&](Address th) { return std::min(k, cover[th].size()); };

    std::set<Address> mpr;
    for (Address n : sym)
        if (will(n) == kWillAlways) mpr.insert(n);
    for (const auto& [th, ns] : cover)
        if (ns.size() <= k) mpr.insert(ns.begin(), ns.end());

    auto covered = [&](Address th, const std::set<Address>& set) {
        std::size_t c = 0;
        for (Address n : cover[th]) c += set.contains(n);
        return c;
    };

    for (;;) {
        std::map<Address, int> gain;
        for (const auto& [th, ns] : cover) {
            if (covered(th, mpr) >= need(th)) continue;
            for (Address n : ns)
                if (!mpr.contains(n)) ++gain[n];
        }
        if (gain.empty()) break;
        auto best = gain.begin();
        for (auto it = gain.begin(); it != gain.end(); ++it) {
            if (it->second > best->second ||
                (it->second == best->second && will(it->first) > will(best->first)))
                best = it;
        }
        mpr.insert(best->first);
    }

    // Drop members whose removal keeps every two-hop node sufficiently covered.
    std::vector<Address> order(mpr.rbegin(), mpr.rend());
    for (Address n : order) {
        if (will(n) == kWillAlways) continue;
        std::set<Address> without = mpr;
        without.erase(n);
        bool ok = true;
        for (const auto& [th, ns] : cover)
            if (ns.contains(n) && covered(th, without) < need(th)) {
                ok = false;
                break;
            }
        if (ok) mpr = std::move(without);
    }

    s.mprs = mpr;
    return mpr;
}

namespace {

struct GraphEdge {
    Address from;
    Address to;
    Metric w;
};

std::vector<GraphEdge> route_graph(const NodeState& s, Time now, const std::vector<Address>& sym) {
    std::vector<GraphEdge> edges;
    std::set<Address> sym_set(sym.begin(), sym.end());
    for (Address n : sym) {
        Metric w = Metric::infinite();
        for (const auto& [addr, l] : s.links)
            if (main_of(s, addr) == n && s.link_symmetric(l, now)) w = std::min(w, l.etx());
        edges.push_back({s.main_address, n, w});
    }
    for (const auto& [key, t] : s.two_hops)
        if (t.expiry > now && sym_set.contains(key.first) && key.second != s.main_address)
            edges.push_back({key.first, key.second, Metric(t.etx)});
    for (const auto& [key, t] : s.topology)
        if (t.expiry > now && t.dest != s.main_address && t.last != t.dest)
            edges.push_back({t.last, t.dest, Metric(t.etx)});
    return edges;
}

struct Label {
    Metric cost;
    int hops = 0;
    Address next_hop;

    bool operator<(const Label& o) const {
        if (cost < o.cost) return true;
        if (o.cost < cost) return false;
        if (hops != o.hops) return hops < o.hops;
        return next_hop < o.next_hop;
    }
};

std::map<Address, Label> hop_routes(const NodeState& s, const std::vector<GraphEdge>& edges) {
    std::map<Address, Label> best;
    std::map<Address, std::vector<const GraphEdge*>> out;
    for (const auto& e : edges) out[e.from].push_back(&e);

    for (const GraphEdge* e : out[s.main_address]) {
        Label l{e->w, 1, e->to};
        auto it = best.find(e->to);
        if (it == best.end() || l.next_hop < it->second.next_hop) best[e->to] = l;
    }
    for (int h = 1;; ++h) {
        std::map<Address, Label> layer;
        for (const auto& [node, lab] : best) {
            if (lab.hops != h) continue;
            for (const GraphEdge* e : out[node]) {
                if (e->to == s.main_address || best.contains(e->to)) continue;
                Label cand{lab.cost + e->w, h + 1, lab.next_hop};
                auto it = layer.find(e->to);
                if (it == layer.end() || cand.next_hop < it->second.next_hop ||
                    (cand.next_hop == it->second.next_hop && cand.cost < it->second.cost))
                    layer[e->to] = cand;
            }
        }
        if (layer.empty()) break;
        best.insert(layer.begin(), layer.end());
    }
    return best;
}

std::map<Address, Label> etx_routes(const NodeState& s, const std::vector<GraphEdge>& edges) {
    std::map<Address, std::vector<const GraphEdge*>> out;
    for (const auto& e : edges)
        if (!e.w.is_infinite()) out[e.from].push_back(&e);

    std::map<Address, Label> dist;
    std::set<std::pair<Label, Address>> queue;
    std::set<Address> done;
    for (const GraphEdge* e : out[s.main_address]) {
        Label l{e->w, 1, e->to};
        auto it = dist.find(e->to);
        if (it == dist.end() || l < it->second) {
            if (it != dist.end()) queue.erase({it->second, e->to});
            dist[e->to] = l;
            queue.insert({l, e->to});
        }
    }
    while (!queue.empty()) {
        auto [lab, node] = *queue.begin();
        queue.erase(queue.begin());
        done.insert(node);
        for (const GraphEdge* e : out[node]) {
            if (e->to == s.main_address || done.contains(e->to)) continue;
            Label cand{lab.cost + e->w, lab.hops + 1, lab.next_hop};
            auto it = dist.find(e->to);
            if (it == dist.end() || cand < it->second) {
                if (it != dist.end()) queue.erase({it->second, e->to});
                dist[e->to] = cand;
                queue.insert({cand, e->to});
            }
        }
    }
    return dist;
}

}  // namespace

RouteTable compute_routes(const NodeState& s, const Params& p, Time now) {
    std::vector<Address> sym = s.sym_neighbors(now);
    auto edges = route_graph(s, now, sym);
    auto labels = p.link_quality_level == 0 ? hop_routes(s, edges) : etx_routes(s, edges);

    // MID aliases reach the same node.
    std::map<Address, Label> aliases;
    for (const auto& [alias, t] : s.mid) {
        if (t.expiry <= now || labels.contains(alias) || alias == s.main_address) continue;
        if (auto it = labels.find(t.main); it != labels.end()) aliases[alias] = it->second;
    }
    labels.insert(aliases.begin(), aliases.end());

    RouteTable table;
    for (const auto& [dest, lab] : labels)
        table.push_back({dest, lab.next_hop, lab.hops, s.iface_name, lab.cost, false, Address{}});

    std::map<HnaNet, std::pair<Label, Address>> nets;
    for (const auto& h : s.hna) {
        if (h.expiry <= now) continue;
        auto it = labels.find(h.gateway);
        if (it == labels.end()) continue;
        auto cur = nets.find(h.net);
        if (cur == nets.end() || it->second < cur->second.first ||
            (!(cur->second.first < it->second) && h.gateway < cur->second.second))
            nets[h.net] = {it->second, h.gateway};
    }
    for (const auto& [net, v] : nets)
        table.push_back({net.network, v.first.next_hop, v.first.hops, s.iface_name, v.first.cost, true,
                         net.netmask});
    return table;
}

Node::Node(Address main, Params params) : params_(std::move(params)) {
    params_.validate();
    state_.main_address = main;
}

Message Node::hello(Time now) {
    expire(state_, params_, now);
    select_mprs(state_, params_, now);
    return emit_hello(state_, params_, now);
}

std::optional<Message> Node::tc(Time now) {
    expire(state_, params_, now);
    select_mprs(state_, params_, now);
    return emit_tc(state_, params_, now);
}

std::optional<Message> Node::mid(Time now) {
    expire(state_, params_, now);
    return emit_mid(state_, params_, now);
}

std::optional<Message> Node::hna(Time now) {
    expire(state_, params_, now);
    return emit_hna(state_, params_, now);
}

std::optional<Message> Node::receive(const Message& m, Address from, Time now) {
    expire(state_, params_, now);
    if (m.type == MsgType::Hello) {
        process_hello(state_, params_, m, from, now);
        return std::nullopt;
    }
    return process_flooded(state_, params_, m, from, now);
}

void Node::tick(Time now) { expire(state_, params_, now); }

RouteTable Node::routes(Time now) {
    expire(state_, params_, now);
    select_mprs(state_, params_, now);
    return compute_routes(state_, params_, now);
}

RemapResult remap_routes(const RouteTable& routes, const std::map<Address, Address>& mapping,
                         const std::string& signaling_iface, const std::string& bond_iface) {
    std::set<Address> targets;
    for (const auto& [k, v] : mapping) targets.insert(v);
    auto map_addr = [&](Address a) -> std::optional<Address> {
        if (auto it = mapping.find(a); it != mapping.end()) return it->second;
        if (targets.contains(a)) return a;
        return std::nullopt;
    };

    RemapResult out;
    for (const auto& r : routes) {
        auto nh = map_addr(r.next_hop);
        auto dest = r.hna ? std::optional<Address>(r.destination) : map_addr(r.destination);
        if (!nh || !dest) {
            out.diagnostics.push_back("dropping route to " + to_string(r.destination) + " via " +
                                      to_string(r.next_hop) + ": address has no bond counterpart");
            continue;
        }
        RouteEntry e = r;
        e.destination = *dest;
        e.next_hop = *nh;
        if (e.egress_interface == signaling_iface) e.egress_interface = bond_iface;
        out.routes.push_back(std::move(e));
    }
    return out;
}

}  // namespace meshsim::olsr
