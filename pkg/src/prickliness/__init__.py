"""Exact prickliness and viewshed computations for polyhedral terrains."""
from .geometry import Direction3, GeometryError, format_rat
from .terrain import (AffineMap, Terrain1D, Terrain2D, TerrainError, VertexClass,
                      apply_affine, classify_vertex, is_local_max, pi_v, pi_v_many,
                      rotation_to_vertical, validate_terrain2d)
from .prickliness1d import AngularSector, brute_force_1d, prickliness_1d, sector
from .prickliness2d import (DirectionGrid, FacePolygon, SphericalCone, brute_force_2d,
                            cone, heatmap, max_overlap, prickliness_2d, project_to_cube)
from .viewshed import (Viewpoint, ViewshedStats, edge_parts, select_viewpoints, visible,
                       viewshed_1d, viewshed_vertices_2d)
from .generators import (GeneratorSpec, gen_cone_gadget, gen_element_distinctness_1d,
                         gen_grid, gen_quadratic, gen_random, gen_random_1d, gen_theorem1_1d,
                         gen_theorem4_2d)
from .io import TerrainFormatError, load_terrain, save_terrain

__version__ = "0.1.0"
