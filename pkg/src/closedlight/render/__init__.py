"""Scene loading, ray casting, rendering and the experiment harness."""

from .mesh import TriangleMesh, icosphere, load_obj, quad
from .renderer import GBuffer, RenderJob, build_gbuffer, render, shade_gbuffer
from .scene import Camera, MeshInstance, Scene, load_scene, parse_scene
