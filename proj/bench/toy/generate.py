# Writes the toy benchmark: scenes, hand-written programs, ground-truth motions and the manifest.
# usage: python3 generate.py OUTDIR
import json, math, os, sys
out = sys.argv[1]
os.makedirs(out, exist_ok=True)

def rect(x0, y0, x1, y1):
    return [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]

def disk(cx, cy, r, n=32):
    return [[round(cx + r * math.cos(2 * math.pi * k / n), 3), round(cy + r * math.sin(2 * math.pi * k / n), 3)] for k in range(n)]

def poly(*pts):
    return [list(p) for p in pts]

def scene(segs):
    lines = ['{', '  "width": 512, "height": 512, "background": [255, 255, 255],', '  "segments": [']
    body = []
    for i, (label, color, path) in enumerate(segs):
        body.append('    {"id": %d, "label": %s, "color": %s,\n     "paths": [%s]}' % (
            i, json.dumps(label), json.dumps(color), json.dumps(path, separators=(", ", ", ")).replace('], [', '],[')))
    lines.append(',\n'.join(body))
    lines += ['  ]', '}']
    return '\n'.join(lines) + '\n'

def gt(moves):
    ms = [dict(id=i, **m) for i, m in sorted(moves.items())]
    return json.dumps({"motions": ms}, indent=2) + '\n'

cases = []
def case(name, segs, program, moves, request, tags):
    with open(os.path.join(out, name + '.json'), 'w') as f: f.write(scene(segs))
    with open(os.path.join(out, name + '.icp'), 'w') as f: f.write(program)
    with open(os.path.join(out, name + '_gt.json'), 'w') as f: f.write(gt(moves))
    cases.append((name, request, tags))

WOOD = [150, 100, 60]; DARK = [70, 70, 70]

case('box_slide', [
    ('table:top', WOOD, rect(100, 300, 412, 316)),
    ('table:leg', WOOD, rect(120, 312, 136, 420)),
    ('table:leg', WOOD, rect(376, 312, 392, 420)),
    ('box:body', [200, 60, 60], rect(150, 244, 214, 304)),
], "# slide the box to the right along the table\nmove(seg3)\nstay(seg0)\n"
   "equal(center_x(seg3), center_x(old(seg3)) + 120)\n",
   {3: dict(tx=120)}, "Slide the box 120 pixels to the right along the table top", 'relation')

case('mug_move', [
    ('mug:body', [60, 120, 200], rect(200, 220, 280, 320)),
    ('mug:handle', [40, 90, 160], poly((276, 240), (316, 240), (316, 300), (276, 300), (276, 288), (304, 288), (304, 252), (276, 252))),
    ('plant:pot', [180, 90, 50], rect(60, 380, 120, 440)),
], "# carry the mug to the right\nmove(seg0)\n"
   "equal(center_x(seg0), center_x(old(seg0)) + 90)\nequal(center_y(seg0), center_y(old(seg0)))\n",
   {0: dict(tx=90), 1: dict(tx=90)}, "Move the mug 90 pixels to the right", 'motion')

case('flag_raise', [
    ('flag:pole', DARK, rect(150, 100, 160, 440)),
    ('flag:cloth', [220, 40, 40], rect(156, 300, 260, 360)),
], "# hoist the flag higher up the pole\nmove(seg1)\nstay(seg0)\n"
   "equal(min_y(seg1), min_y(old(seg1)) - 160)\nequal(min_x(seg1), min_x(old(seg1)))\n",
   {1: dict(ty=-160)}, "Raise the flag 160 pixels up the pole", 'relation')

case('sun_rise', [
    ('hill:body', [80, 160, 70], poly((40, 440), (140, 340), (256, 300), (372, 340), (472, 440))),
    ('sun:disk', [250, 200, 40], disk(256, 300, 40)),
], "# lift the sun clear of the hill\nmove(seg1)\nstay(seg0)\n"
   "equal(center_y(seg1), center_y(old(seg1)) - 150)\nequal(center_x(seg1), center_x(old(seg1)))\n",
   {1: dict(ty=-150)}, "Move the sun 150 pixels up into the sky", 'relation')

case('car_drive', [
    ('tree:crown', [60, 150, 70], disk(420, 200, 40)),
    ('car:body', [40, 140, 90], rect(100, 300, 240, 370)),
    ('car:wheel', [30, 30, 30], disk(130, 380, 22)),
    ('car:wheel', [30, 30, 30], disk(210, 380, 22)),
], "# drive the car forward\nmove(seg1)\n"
   "equal(center_x(seg1), center_x(old(seg1)) + 100)\nequal(center_y(seg1), center_y(old(seg1)))\n",
   {1: dict(tx=100), 2: dict(tx=100), 3: dict(tx=100)}, "Drive the car 100 pixels to the right", 'motion')

case('tree_widen', [
    ('tree:trunk', [110, 70, 40], rect(240, 300, 272, 440)),
    ('tree:crown', [50, 150, 60], disk(256, 250, 56)),
], "# make the crown twice as wide\nscale(seg1)\nstay(seg0)\n"
   "equal(hori_len(seg1), 2 * hori_len(old(seg1)))\nequal(vert_len(seg1), vert_len(old(seg1)))\n",
   {1: dict(sx=2)}, "Make the tree crown twice as wide", 'scale')

case('window_shrink', [
    ('house:wall', [230, 210, 170], rect(120, 200, 392, 440)),
    ('house:window', [120, 180, 230], rect(200, 260, 312, 360)),
    ('house:roof', [170, 60, 50], poly((100, 210), (256, 90), (412, 210))),
], "# halve the window\nscale(seg1)\n"
   "equal(hori_len(seg1), 0.5 * hori_len(old(seg1)))\nequal(vert_len(seg1), 0.5 * vert_len(old(seg1)))\n",
   {1: dict(sx=0.5, sy=0.5)}, "Shrink the window to half its size", 'scale')

case('fish_swim', [
    ('fish:body', [240, 140, 40], poly((180, 260), (220, 230), (280, 225), (330, 245), (345, 265), (330, 285), (280, 305), (220, 300))),
    ('fish:tail', [220, 110, 30], poly((190, 265), (140, 225), (150, 265), (140, 305))),
    ('fish:fin', [220, 110, 30], poly((240, 235), (260, 195), (290, 232))),
    ('weed:stem', [60, 130, 60], rect(300, 200, 312, 470)),
], "# the fish swims up and to the left, away from the weed\nmove(seg0)\nstay(seg3)\n"
   "equal(center_x(seg0), center_x(old(seg0)) - 70)\nequal(center_y(seg0), center_y(old(seg0)) - 50)\n",
   {0: dict(tx=-70, ty=-50), 1: dict(tx=-70, ty=-50), 2: dict(tx=-70, ty=-50)}, "Move the fish 70 pixels left and 50 pixels up, leaving the weed", 'relation,motion')

with open(os.path.join(out, 'manifest.txt'), 'w') as f:
    f.write('# Toy benchmark: hand-written programs with analytic ground-truth motions.\n')
    f.write('# case NAME scene=... program=... request="..." gt_motions=... tags=...\n')
    for name, req, tags in cases:
        f.write('case %s scene=%s.json program=%s.icp request="%s" gt_motions=%s_gt.json tags=%s\n' % (name, name, name, req, name, tags))
