use super::{bfs, multi_source_bfs, Graph, GraphError};

/// Least `M` such that every vertex lies within `M` of some geodesic from `v`
/// to a vertex at maximal distance from `v` (finite stand-ins for rays).
pub fn pole_radius(graph: &Graph, v: usize) -> Result<usize, GraphError> {
    if v >= graph.vertex_count() {
        return Err(GraphError::VertexOutOfRange(v));
    }
    let from_v: Vec<usize> = bfs(graph, v)
        .into_iter()
        .collect::<Option<_>>()
        .ok_or(GraphError::Disconnected)?;
    let ecc = from_v.iter().copied().max().unwrap_or(0);
    let far: Vec<usize> = (0..graph.vertex_count()).filter(|&u| from_v[u] == ecc).collect();
    // x lies on a geodesic from v to the far set iff d(v, x) + d(x, far) = ecc
    let to_far = multi_source_bfs(graph, &far);
    let on_rays: Vec<usize> = (0..graph.vertex_count())
        .filter(|&x| to_far[x].map(|d| from_v[x] + d) == Some(ecc))
        .collect();
    let cover = multi_source_bfs(graph, &on_rays);
    Ok(cover.into_iter().map(|d| d.expect("connected")).max().unwrap_or(0))
}

/// Least `M` on the grid that works as a pole radius, or `None`.
pub fn has_pole(graph: &Graph, v: usize, m_grid: &[usize]) -> Result<Option<usize>, GraphError> {
    let m = pole_radius(graph, v)?;
    Ok(m_grid.iter().copied().filter(|&g| g >= m).min())
}
