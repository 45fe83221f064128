//! Typed device-and-link graph.
//!
//! Vertices are phones, base stations and WiFi access points; links are
//! undirected WiFi or cellular connections carrying the two fractional
//! parameters used by the link model (capacity share and delay share of a
//! slot). Vertices are never removed: churn flips a liveness flag so ids stay
//! stable across a whole simulation trace.

use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Index of a vertex inside its [`DeviceGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

/// Index of a link inside its [`DeviceGraph`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub u32);

impl VertexId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl LinkId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for LinkId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DeviceKind {
    Phone,
    BaseStation,
    WifiAccessPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkKind {
    WifiLink,
    CellLink,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    id: VertexId,
    kind: DeviceKind,
    pub alive: bool,
}

impl Vertex {
    pub fn id(&self) -> VertexId {
        self.id
    }

    pub fn kind(&self) -> DeviceKind {
        self.kind
    }
}

/// An undirected link. Both fractions are validated on construction and the
/// fields are private so an out-of-range value can never be observed.
#[derive(Clone, Debug, PartialEq)]
pub struct Link {
    id: LinkId,
    endpoints: (VertexId, VertexId),
    kind: LinkKind,
    rho_capacity: f64,
    rho_delay: f64,
}

impl Link {
    pub fn id(&self) -> LinkId {
        self.id
    }

    pub fn endpoints(&self) -> (VertexId, VertexId) {
        self.endpoints
    }

    pub fn kind(&self) -> LinkKind {
        self.kind
    }

    /// Share of the network-wide maximum capacity, in `(0, 1]`.
    pub fn rho_capacity(&self) -> f64 {
        self.rho_capacity
    }

    /// Share of a slot lost to propagation delay, in `[0, 1]`.
    pub fn rho_delay(&self) -> f64 {
        self.rho_delay
    }

    /// The endpoint opposite `v`, if `v` is an endpoint at all.
    pub fn other(&self, v: VertexId) -> Option<VertexId> {
        match self.endpoints {
            (a, b) if a == v => Some(b),
            (a, b) if b == v => Some(a),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RhoField {
    Capacity,
    Delay,
}

impl fmt::Display for RhoField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RhoField::Capacity => "rho_capacity",
            RhoField::Delay => "rho_delay",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TopologyError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown link {0}")]
    UnknownLink(LinkId),
    #[error("link endpoints must be distinct, got {0} twice")]
    SelfLoop(VertexId),
    #[error("{field} = {value} is out of range")]
    ParameterOutOfRange { field: RhoField, value: f64 },
}

/// Checks the two link fractions: `rho_capacity` in `(0, 1]`, `rho_delay` in `[0, 1]`.
pub fn check_rho(rho_capacity: f64, rho_delay: f64) -> Result<(), TopologyError> {
    // NaN fails both comparisons.
    if !(rho_capacity > 0.0 && rho_capacity <= 1.0) {
        return Err(TopologyError::ParameterOutOfRange {
            field: RhoField::Capacity,
            value: rho_capacity,
        });
    }
    if !(0.0..=1.0).contains(&rho_delay) {
        return Err(TopologyError::ParameterOutOfRange {
            field: RhoField::Delay,
            value: rho_delay,
        });
    }
    Ok(())
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DeviceGraph {
    vertices: Vec<Vertex>,
    links: Vec<Link>,
    adjacency: Vec<Vec<(VertexId, LinkId)>>,
}

impl DeviceGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_device(&mut self, kind: DeviceKind) -> VertexId {
        let id = VertexId(self.vertices.len() as u32);
        self.vertices.push(Vertex {
            id,
            kind,
            alive: true,
        });
        self.adjacency.push(Vec::new());
        id
    }

    /// Adds an undirected link. Parallel links between the same pair are allowed.
    pub fn add_link(
        &mut self,
        a: VertexId,
        b: VertexId,
        kind: LinkKind,
        rho_capacity: f64,
        rho_delay: f64,
    ) -> Result<LinkId, TopologyError> {
        self.vertex(a)?;
        self.vertex(b)?;
        if a == b {
            return Err(TopologyError::SelfLoop(a));
        }
        check_rho(rho_capacity, rho_delay)?;

        let id = LinkId(self.links.len() as u32);
        self.links.push(Link {
            id,
            endpoints: (a, b),
            kind,
            rho_capacity,
            rho_delay,
        });
        self.adjacency[a.index()].push((b, id));
        self.adjacency[b.index()].push((a, id));
        Ok(id)
    }

    /// Alive vertices adjacent to `v`, each paired with the connecting link.
    /// A neighbor reachable over parallel links appears once per link.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<(VertexId, LinkId)>, TopologyError> {
        self.vertex(v)?;
        Ok(self.adjacency[v.index()]
            .iter()
            .copied()
            .filter(|(u, _)| self.vertices[u.index()].alive)
            .collect())
    }

    /// Number of incident links regardless of liveness.
    pub fn degree(&self, v: VertexId) -> Result<usize, TopologyError> {
        self.vertex(v)?;
        Ok(self.adjacency[v.index()].len())
    }

    pub fn set_alive(&mut self, v: VertexId, alive: bool) -> Result<(), TopologyError> {
        self.vertices
            .get_mut(v.index())
            .ok_or(TopologyError::UnknownVertex(v))?
            .alive = alive;
        Ok(())
    }

    pub fn vertex(&self, v: VertexId) -> Result<&Vertex, TopologyError> {
        self.vertices
            .get(v.index())
            .ok_or(TopologyError::UnknownVertex(v))
    }

    pub fn link(&self, e: LinkId) -> Result<&Link, TopologyError> {
        self.links
            .get(e.index())
            .ok_or(TopologyError::UnknownLink(e))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }
}
