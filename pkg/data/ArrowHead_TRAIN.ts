#The arrowhead data consists of outlines of the images of
#arrowheads. The shapes of the projectile points are converted into
#a time series using the angle-based method. The classification of
#projectile points is is an <a
#href="http://alumni.cs.ucr.edu/~lexiangy/Shapelet/Proj_Point_Review.pdf">important
#topic in anthropology</a>. The classes are based on shape
#distinctions, such as the presence and location of a notch in the
#arrow. The problem in the repository is a length normalised version
#of that used in Ye09shapelets. The three classes are called
#"Avonlea", "Clovis" and "Mix".

@problemName ArrowHead
@timeStamps false
@classLabel true 0 1 2
@univariate true
@missing false
@data
-1.9630089,-1.9578249,-1.9561449,-1.9382889,-1.8966569,-1.8698569,-1.8387049,-1.8122888,-1.7364328,-1.6733288,-1.6230727,-1.5858727,-1.5438407,-1.4567846,-1.3787206,-1.2924965,-1.2169605,-1.1089764,-0.96868834,-0.83160026,-0.76030422,-0.59963213,-0.46625605,-0.30638396,-0.22684791,-0.089759829,0.041376247,0.23203876,0.38728525,0.41471247,0.51567412,0.62614779,0.72741025,0.75345186,0.78001988,0.83840391,0.88817034,0.91981996,0.93344237,0.9834616,1.04958,1.1308921,1.1898697,1.2635882,1.2976586,1.4139322,1.4014314,1.4443339,1.4868475,1.4448603,1.4448603,1.4635131,1.4635131,1.4424827,1.4822811,1.5221659,1.5411515,1.5181995,1.4952875,1.4739563,1.4479355,1.3584794,1.2685802,1.2195033,1.1558585,1.0848617,0.97762959,0.94645038,0.93098797,0.80343589,0.73402625,0.67427262,0.61799258,0.49093171,0.40673646,0.34117002,0.2967364,0.27182598,0.24302436,0.25131557,0.26468518,0.28406759,0.27179398,0.23864996,0.15689631,0.09680028,-0.05662381,-0.16731187,-0.28022394,-0.34350398,-0.41529602,-0.47657606,-0.53492809,-0.59041612,-0.57228811,-0.62446414,-0.65118416,-0.67648017,-0.67852817,-0.7229122,-0.80680025,-0.82627226,-0.82524826,-0.84297627,-0.86462428,-0.84484827,-0.82256026,-0.84185627,-0.79542424,-0.74392021,-0.68369618,-0.66182416,-0.62396814,-0.64110415,-0.57260811,-0.53137609,-0.51996808,-0.47995206,-0.44576004,-0.37147199,-0.33326397,-0.31019196,-0.40185601,-0.48315206,-0.53822409,-0.62452814,-0.67971217,-0.65051216,-0.62288014,-0.5513601,-0.50033607,-0.45872004,-0.46732805,-0.46492805,-0.50020807,-0.48531206,-0.47755206,-0.48851206,-0.50958407,-0.53227209,-0.57872011,-0.61390414,-0.65249616,-0.66310416,-0.67270417,-0.70216019,-0.7296482,-0.73483221,-0.74185621,-0.70041619,-0.67758417,-0.67374417,-0.63001614,-0.57931212,-0.57552011,-0.60944013,-0.5477921,-0.51206408,-0.48196806,-0.44331204,-0.42489602,-0.380352,-0.32425597,-0.25411193,-0.15044786,-0.13931186,-0.046799804,0.042720248,0.22662116,0.42361647,0.55557335,0.56090295,0.57435896,0.53941494,0.50561332,0.49451091,0.49604371,0.57437016,0.650055,0.77233027,0.76694467,0.85275912,0.86693353,0.92638636,0.94545038,1.0648216,1.1177545,1.1461961,1.1855593,1.1950825,1.2903274,1.3201882,1.3473434,1.3915018,1.4367611,1.4191547,1.4416795,1.4416795,1.4466619,1.4690155,1.5308843,1.4739563,1.4739563,1.4397739,1.3986362,1.3962362,1.3768282,1.3597226,1.2935594,1.1855625,1.1610233,1.0883689,1.0312904,0.91713516,0.79701509,0.76474307,0.67662462,0.66052221,0.63566299,0.59247737,0.56743895,0.51975573,0.43992688,0.41277006,0.25329957,0.1350883,-0.0090397822,-0.11716785,-0.17430388,-0.31575996,-0.48673606,-0.61859214,-0.68387218,-0.81899226,-0.95635234,-1.0826724,-1.1414404,-1.2535525,-1.3566566,-1.4456006,-1.5298087,-1.5838567,-1.6553287,-1.7191528,-1.7508808,-1.7962728,-1.8413449,-1.8842889,-1.9053929,-1.9239049,-1.9091529:0
-1.7745713,-1.7740359,-1.7765863,-1.7307487,-1.6962683,-1.6573775,-1.6362272,-1.6098068,-1.5434388,-1.4861735,-1.4555963,-1.3918069,-1.3205917,-1.2596627,-1.2183342,-1.146344,-1.0521042,-0.94822635,-0.89339877,-0.78589953,-0.68385345,-0.57293012,-0.49669852,-0.38615564,-0.25840782,-0.17280578,-0.095277818,0.0042882671,0.12645611,0.20264544,0.25230167,0.36048009,0.44598349,0.52665654,0.58079084,0.63372742,0.71462028,0.73760672,0.76459355,0.83140682,0.90986478,0.93283008,0.9678628,1.0520727,1.0985091,1.1173077,1.1704557,1.1822962,1.1626254,1.1940072,1.1922712,1.2243645,1.2405789,1.2405789,1.2229653,1.2557153,1.2888683,1.2546303,1.2536482,1.287975,1.304784,1.3040724,1.3210476,1.2858726,1.2853681,1.2678363,1.2482387,1.2256609,1.1625986,1.1406465,1.0953161,1.0970155,1.0216012,0.98883706,0.92640606,0.87716269,0.81654659,0.78554104,0.72775156,0.66180629,0.59756179,0.57795716,0.50923458,0.50966154,0.4401865,0.3875712,0.33592111,0.30331061,0.22284611,0.19007638,0.14464742,0.11838204,0.076165794,0.046067696,0.032005008,-0.046297955,-0.11063687,-0.16019446,-0.24634603,-0.32225355,-0.41219557,-0.45779362,-0.55051155,-0.62305134,-0.6515149,-0.76208596,-0.84773026,-0.92218642,-0.96505084,-1.0207661,-1.0928691,-1.1556439,-1.1661557,-1.1869257,-1.1546294,-1.1726375,-1.1813175,-1.1943375,-1.1662544,-1.1551226,-1.1359308,-1.1202195,-1.1282936,-1.10727,-1.1093273,-1.0922069,-1.0637715,-1.08898,-1.0867678,-1.1259827,-1.1170209,-1.1061005,-1.0999709,-1.0921928,-1.0880923,-1.1161331,-1.1078618,-1.1136813,-1.1177959,-1.0989423,-1.0992805,-1.0753401,-1.0109166,-0.93623502,-0.89276468,-0.81682899,-0.72688696,-0.63539495,-0.60617048,-0.53361659,-0.4423923,-0.37698249,-0.30893768,-0.21688202,-0.12496728,-0.083117398,0.0065428062,0.086719855,0.12895019,0.15938647,0.17254734,0.21734785,0.26257391,0.29481382,0.34214787,0.39087973,0.42337328,0.44034855,0.50903027,0.5618203,0.5762564,0.6100153,0.6632802,0.74235957,0.78897358,0.83092632,0.89144097,0.93261449,0.95902924,0.96880407,1.0276095,1.1018247,1.1354765,1.1579035,1.2042315,1.2452247,1.3019151,1.3194131,1.3196865,1.3372451,1.3376312,1.3205051,1.3034524,1.2864757,1.2871774,1.304784,1.2712561,1.2712561,1.2546303,1.2381017,1.2216746,1.1891388,1.1730357,1.1906479,1.1922712,1.1352792,1.1451161,1.1275349,1.0660691,0.99995899,0.96509113,0.8916157,0.88277086,0.81641554,0.77211103,0.67929025,0.65058996,0.56274466,0.52485854,0.426958,0.35557929,0.24435723,0.18035368,0.10310754,-0.0040112552,-0.10581779,-0.16729625,-0.29297272,-0.40340287,-0.53115069,-0.59017735,-0.71152792,-0.82841168,-0.9333323,-0.975464,-1.0765378,-1.1675226,-1.2362719,-1.2775159,-1.3540998,-1.4076028,-1.4716881,-1.4846658,-1.5399724,-1.59015,-1.6356635,-1.6399894,-1.6786829,-1.7292269,-1.7756704,-1.7893245:1
-1.8660211,-1.8419912,-1.8350253,-1.8119025,-1.7643904,-1.7076874,-1.6482802,-1.582643,-1.5315025,-1.4936092,-1.4152725,-1.3317327,-1.2628607,-1.1505501,-1.0464377,-0.99209661,-0.89874975,-0.77255863,-0.67161257,-0.55115507,-0.42277319,-0.35821427,-0.24924114,-0.14184261,-0.037353691,0.10186218,0.20089988,0.27859308,0.36817286,0.50152674,0.61606577,0.68694538,0.80943446,0.82866693,0.9214815,0.9878478,1.0296023,1.1238922,1.1941813,1.2250214,1.3076643,1.3263714,1.3228644,1.3388587,1.3535864,1.3802212,1.425065,1.4087935,1.4274732,1.4062656,1.4250993,1.3850118,1.4015366,1.3374843,1.3545089,1.3525372,1.3097575,1.3293169,1.2652646,1.2439715,1.2212064,1.1579226,1.1359037,1.1114254,1.048845,1.0226227,0.97587222,0.94867943,0.9211546,0.90069839,0.87303664,0.78452314,0.74748905,0.6986009,0.67012959,0.64038148,0.5522565,0.51227173,0.47150993,0.40948749,0.36749681,0.33602177,0.2565674,0.19377135,0.13100954,0.10999195,0.10343679,0.072201361,0.013085106,-0.067219894,-0.14735374,-0.17454996,-0.21292246,-0.26231723,-0.34005493,-0.3667548,-0.39374564,-0.41426688,-0.48827345,-0.50970181,-0.55651216,-0.60227848,-0.66738509,-0.71147411,-0.73779745,-0.76085176,-0.80985287,-0.81336151,-0.83775082,-0.88892557,-0.91319507,-0.91536871,-0.93907341,-0.98963201,-0.97410843,-1.0071752,-1.0406014,-1.0430489,-1.0629197,-1.0951821,-1.0799837,-1.0829618,-1.0852552,-1.0861452,-1.0873604,-1.070536,-1.0538657,-1.0530956,-1.0517092,-1.050785,-1.0623036,-1.0305034,-1.0269091,-0.9949891,-0.99379103,-0.96373656,-0.95997119,-0.92906095,-0.89919475,-0.89746611,-0.88083003,-0.87940946,-0.85096383,-0.823973,-0.77741937,-0.7547416,-0.68941249,-0.66738509,-0.57759822,-0.50811009,-0.48099945,-0.43603755,-0.38713913,-0.35932676,-0.30969239,-0.28143502,-0.2016606,-0.173369,-0.092396504,-0.082657897,-6.7559759E-4,0.081392278,0.08911128,0.14920311,0.21291311,0.24485882,0.28786615,0.35179181,0.35673471,0.41957868,0.46120138,0.49213044,0.53279298,0.63252214,0.63206516,0.68034571,0.70827104,0.73705556,0.80483044,0.83258804,0.88041162,0.92791857,0.9955223,1.0015229,1.0276084,1.0895572,1.1558567,1.1977019,1.2000502,1.2424123,1.2439715,1.2457052,1.2476119,1.2903368,1.2733122,1.2947046,1.2971128,1.2996664,1.3023603,1.3265168,1.3690638,1.3507008,1.3144591,1.3097028,1.2656172,1.2723041,1.2178227,1.2289459,1.1727855,1.1042404,1.0716837,0.99819742,1.0018687,0.9546133,0.91235391,0.86454916,0.77262116,0.6956776,0.59285229,0.53194064,0.45686094,0.3751097,0.2346581,0.14191199,0.015737978,-0.044182697,-0.16671115,-0.27169641,-0.39824696,-0.50710029,-0.63457506,-0.69733687,-0.78851009,-0.90874509,-1.0157328,-1.1060503,-1.200715,-1.269878,-1.3426694,-1.4291359,-1.5101426,-1.584132,-1.6523365,-1.6845646,-1.7439719,-1.7991174,-1.8290691,-1.8758281,-1.8625124,-1.8633682,-1.8464925:2
-2.0737575,-2.0733013,-2.0446071,-2.0383458,-1.9590426,-1.8744941,-1.8056195,-1.7310435,-1.7126534,-1.6280219,-1.5580278,-1.441447,-1.3616256,-1.3061859,-1.1958042,-1.0955817,-0.97564212,-0.93206167,-0.81763708,-0.6982366,-0.55144803,-0.40403747,-0.3273674,-0.19952865,-0.078365882,0.018062598,0.10095253,0.1193011,0.15056624,0.24654481,0.33330142,0.41426734,0.41515886,0.53812538,0.60889489,0.72697676,0.88807099,0.97535836,1.085201,1.1547618,1.219158,1.2983948,1.2984881,1.3775445,1.4140945,1.449587,1.4326753,1.5121152,1.5531663,1.496748,1.5175846,1.5386263,1.5315813,1.5195791,1.4315764,1.3929573,1.3330684,1.3115104,1.2059864,1.1760233,1.1121848,1.0617107,0.99669246,0.9510802,0.86898019,0.73690779,0.68661612,0.55079937,0.44757674,0.36179458,0.36090721,0.29503687,0.33784606,0.40895973,0.45290923,0.45016834,0.43950129,0.33073677,0.23032551,0.031435286,-0.085497982,-0.25312307,-0.37459683,-0.46652628,-0.60462779,-0.6184566,-0.67628051,-0.69440102,-0.70344055,-0.77513474,-0.77652384,-0.82000062,-0.88435539,-0.91754868,-0.94781864,-0.94953946,-1.0045437,-0.94910407,-0.86275176,-0.85904058,-0.82447892,-0.75800941,-0.63357085,-0.53025906,-0.49227648,-0.40561317,-0.33756796,-0.29962685,-0.29995857,-0.28090508,-0.20817425,-0.13596174,-0.04778493,0.045305562,0.071408219,0.088429888,0.092410595,0.072030204,-0.080294037,-0.12300371,-0.19523695,-0.094889963,0.0021605033,0.041698046,0.082997882,0.180463,0.093260642,-0.092713014,-0.06831045,0.041946841,0.035208665,0.11312271,0.035602589,0.036597765,0.080406275,0.0031142143,-0.0075010043,-0.057218376,-0.082056329,-0.13135904,-0.25646106,-0.30138914,-0.43123897,-0.47558654,-0.53515201,-0.56455119,-0.64159446,-0.76986859,-0.80432659,-0.8995111,-0.9922906,-1.0014338,-0.94827476,-0.8938303,-0.83592345,-0.77513474,-0.71131903,-0.73769121,-0.729792,-0.7313055,-0.68981906,-0.57649331,-0.53712163,-0.41396851,-0.32778206,-0.21107685,-0.15433104,-0.056140268,0.11496793,0.22105792,0.430638,0.63502243,0.7379009,0.7158992,0.63333477,0.62030003,0.60539104,0.61187005,0.61687082,0.54640401,0.63062499,0.71965806,0.75085893,0.83577238,0.99333167,1.0934133,1.1418784,1.2213889,1.2846634,1.3198098,1.3513838,1.3893975,1.4423243,1.4869539,1.6109031,1.6487012,1.6561774,1.6333651,1.6107373,1.5883002,1.5440065,1.5221541,1.6048616,1.5917128,1.6307673,1.537428,1.5053688,1.4100225,1.3824976,1.3217669,1.2421881,1.0761511,0.92947657,0.77856838,0.65162114,0.56126739,0.4733145,0.40661899,0.36934755,0.32316306,0.29124691,0.23270978,0.14177551,0.083143011,-0.0041837485,-0.058296484,-0.17006727,-0.26560424,-0.39416864,-0.57000393,-0.64499465,-0.76294382,-0.88116253,-0.98501337,-1.0680484,-1.1204818,-1.2351137,-1.3460967,-1.4579089,-1.5292092,-1.6075586,-1.6789418,-1.743732,-1.8198008,-1.8581358,-1.8861459,-1.9512471,-2.0129273,-2.0269634,-2.073405,-2.0752917:0
-1.7462554,-1.7412629,-1.7227405,-1.6986402,-1.6772231,-1.630356,-1.5794396,-1.551225,-1.4739804,-1.4593771,-1.3931419,-1.3370705,-1.2969358,-1.2145199,-1.1224931,-1.0785044,-0.9830463,-0.93017847,-0.85028317,-0.73181436,-0.68215016,-0.5779594,-0.51453753,-0.40571209,-0.27574603,-0.21081179,-0.12208622,-0.05866434,0.045266225,0.16458066,0.23315759,0.32513558,0.39003729,0.44007228,0.55047838,0.5753365,0.67714975,0.79103755,0.84626174,0.91360764,0.96458744,1.0623677,1.1350833,1.1789209,1.2230706,1.2237731,1.2903059,1.3454098,1.3805569,1.4125752,1.4364657,1.4497258,1.4477662,1.4723121,1.4907646,1.5077551,1.5265914,1.5049987,1.4627858,1.4363616,1.4047905,1.3991102,1.3579267,1.3303934,1.2674643,1.2193824,1.1993183,1.1235406,1.098123,1.0134564,0.94299799,0.92308352,0.84205313,0.80364061,0.69966451,0.63233813,0.60850614,0.54288401,0.49915544,0.45654733,0.39545255,0.39745278,0.39699744,0.36351394,0.32424116,0.31410993,0.27646335,0.24894802,0.20032458,0.19765761,0.15111571,0.1170793,0.050583905,-0.031945843,-0.08008142,-0.16477402,-0.26969656,-0.32004378,-0.42200664,-0.45184744,-0.5359546,-0.63894197,-0.66977476,-0.77092452,-0.81571012,-0.89812603,-0.98031428,-1.0153101,-1.0160257,-1.0265635,-1.0098786,-1.0017476,-0.98283489,-1.0139441,-0.99330763,-0.96419862,-0.94645676,-0.91986835,-0.89680881,-0.87044808,-0.83733861,-0.84363201,-0.84621767,-0.81123807,-0.77324999,-0.77375411,-0.78897536,-0.78788581,-0.82314186,-0.88046548,-0.87729439,-0.93121924,-0.92570642,-0.97844415,-0.99493384,-1.0169689,-1.0288889,-1.038516,-1.0775612,-1.0947664,-1.0837895,-1.0617382,-1.0153101,-0.96813403,-0.88441715,-0.83524081,-0.75061326,-0.6494635,-0.59830319,-0.51562708,-0.46401143,-0.36102406,-0.2590612,-0.20871399,-0.13576257,-0.10185626,6.2698183E-4,0.08831179,0.12130743,0.1889249,0.18287543,0.19464913,0.27649588,0.293571,0.32227346,0.34110488,0.38065411,0.41380424,0.45503984,0.49495334,0.53698903,0.58022811,0.62501046,0.66895044,0.71602573,0.80430085,0.82148818,0.90199656,0.96298238,1.0619872,1.0850044,1.132644,1.1922687,1.2467758,1.2658966,1.3125914,1.3467498,1.3863608,1.443486,1.4513097,1.4593708,1.4818611,1.4860405,1.4484898,1.4687539,1.4520057,1.4336882,1.397471,1.3478279,1.3428079,1.2992338,1.2118466,1.2204459,1.1770215,1.1389472,1.1088397,1.0433916,0.99977683,0.92669856,0.87920534,0.85655234,0.75204773,0.69484608,0.63655324,0.57810755,0.50992578,0.3995213,0.34947982,0.23159644,0.20920364,0.11410335,-0.015309797,-0.049622658,-0.18253214,-0.29108112,-0.35601536,-0.46584904,-0.51037445,-0.61785013,-0.74189682,-0.78222662,-0.88988119,-0.946782,-1.0224817,-1.1177771,-1.161587,-1.234018,-1.2773888,-1.3738226,-1.4467578,-1.481526,-1.5471107,-1.6071013,-1.635137,-1.6863461,-1.6912735,-1.7168862,-1.7407263,-1.7434421,-1.7627288,-1.7634281:1
-1.9828064,-1.978861,-1.9373334,-1.8914424,-1.8408704,-1.7853164,-1.7372187,-1.691963,-1.604628,-1.5488232,-1.4855622,-1.3992805,-1.3228457,-1.2314483,-1.1241018,-1.0300964,-0.91076314,-0.84920738,-0.74271356,-0.63076967,-0.5024254,-0.39402574,-0.28721428,-0.17017139,-0.07240439,0.071420771,0.20574842,0.29087827,0.32068484,0.43133308,0.48334619,0.58157462,0.67435631,0.76161102,0.80520494,0.88157287,0.9911311,1.0195283,1.0786048,1.1166718,1.1330705,1.165801,1.2537094,1.2690799,1.2661961,1.2634176,1.2191198,1.195631,1.1508083,1.1248268,1.0809554,1.0706303,1.0421963,1.0387825,1.0580199,1.0968759,1.0744387,1.0940489,1.0717019,1.1137728,1.1336105,1.1560477,1.1560477,1.1985098,1.2185547,1.1960339,1.1937385,1.1068583,1.05806,1.0229973,0.98578467,0.95622219,0.91574953,0.86174864,0.77515596,0.72019546,0.67388987,0.60557,0.4800494,0.42891732,0.39716478,0.36105886,0.32447648,0.29046199,0.21617211,0.14202934,0.088984727,0.052211761,0.071654823,0.068812759,0.13203364,0.17655875,0.22116077,0.24537515,0.26946583,0.20566985,0.13030165,0.05712686,-0.016281983,-0.13513042,-0.22876807,-0.36326457,-0.46611386,-0.57016684,-0.64482953,-0.77009769,-0.87851407,-0.95949618,-1.0446076,-1.093558,-1.1380112,-1.1536092,-1.1693241,-1.1850223,-1.2004698,-1.2407268,-1.2165525,-1.2278037,-1.1822806,-1.1139707,-0.98764933,-0.93731136,-0.94361406,-0.94567037,-0.92870158,-0.92632762,-0.92507377,-0.9224156,-0.91960697,-0.93219565,-0.97939063,-1.0028795,-1.0694005,-1.1562506,-1.1964073,-1.257495,-1.2694985,-1.2290074,-1.210417,-1.1918767,-1.1441802,-1.0689491,-0.99699471,-0.90698487,-0.80413558,-0.67794794,-0.5522284,-0.42542218,-0.37053691,-0.26701891,-0.15947186,-0.043783133,0.027502522,0.098296666,0.17146811,0.22477855,0.30212449,0.40460932,0.42778719,0.42711679,0.40173549,0.35504539,0.28939705,0.2682755,0.28501192,0.30199241,0.27672145,0.34860728,0.42029417,0.47080768,0.50616964,0.57624324,0.66639184,0.73443921,0.78029508,0.88782374,0.9302173,0.97069331,1.029738,1.0599358,1.1156419,1.1222171,1.1703751,1.1935964,1.2173009,1.2192151,1.2192151,1.1769269,1.1348242,1.0929154,1.1128584,1.0929154,1.0730795,1.0533539,1.0557095,1.0362196,1.0168534,1.058279,1.0389129,1.0005701,1.0259715,1.0538889,1.0573244,1.0854726,1.0932849,1.1175077,1.1413559,1.1320139,1.1599865,1.071085,1.0517807,1.0131788,0.94935443,0.90651282,0.85372064,0.75879905,0.71580697,0.58925822,0.51661005,0.45497905,0.34959866,0.27446284,0.14420603,0.057344194,0.0012886599,-0.094873414,-0.19645213,-0.30242768,-0.43421587,-0.54241492,-0.65071428,-0.75762604,-0.89461353,-0.99258115,-1.0964335,-1.1437121,-1.244923,-1.3272426,-1.418523,-1.5102213,-1.5890802,-1.6435308,-1.7118073,-1.7569626,-1.8146565,-1.8668669,-1.8735374,-1.9196792,-1.9790114,-1.964868,-1.9837928:2
-2.0830233,-2.0920583,-2.0494615,-2.0367842,-1.9729955,-1.8758105,-1.819614,-1.7911137,-1.718905,-1.6318902,-1.5466021,-1.4817491,-1.4201127,-1.3190488,-1.2245365,-1.1210839,-1.0196416,-0.86789214,-0.75741492,-0.65166804,-0.48906242,-0.43525474,-0.29698674,-0.22447054,-0.10618825,0.010130949,0.076119269,0.08352226,0.13487016,0.17588226,0.1771358,0.27819963,0.35169501,0.41932003,0.47988974,0.52915629,0.56426018,0.67355718,0.77615128,0.87078657,1.0052727,1.1517383,1.2056241,1.2825466,1.320465,1.3862571,1.409334,1.4593858,1.4847618,1.4193908,1.3449469,1.323729,1.2495193,1.2337365,1.1470932,1.0834345,1.0434253,0.94665895,0.92412595,0.83199064,0.75354496,0.58520852,0.49898141,0.35941493,0.27843615,0.16717842,0.1128031,0.085911085,0.05504558,0.048730569,0.10194696,0.12711239,0.20854529,0.26467084,0.36009137,0.42571546,0.45996316,0.52936206,0.50599652,0.50298092,0.42495624,0.33001584,0.20897102,0.095490034,-0.089277262,-0.16787195,-0.29585145,-0.41600223,-0.49171141,-0.52830063,-0.56498446,-0.60188116,-0.6668288,-0.66427441,-0.62638435,-0.58541955,-0.51238302,-0.46772856,-0.38281885,-0.3094985,-0.21940907,-0.12591379,-0.029154571,0.020419451,0.13976607,0.18647823,0.26606629,0.37299102,0.39396538,0.492612,0.53176507,0.50482812,0.52645763,0.59520374,0.5749957,0.45305449,0.3495498,0.36977676,0.34070878,0.16949629,0.097524083,0.043669099,-0.10074835,-0.14436214,-0.20805624,-0.1876921,-0.17664674,-0.19076683,-0.22931914,-0.31548239,-0.40270996,-0.43780912,-0.54717471,-0.67080229,-0.68345597,-0.66311548,-0.65348923,-0.61368337,-0.59419435,-0.54651246,-0.5169478,-0.54859381,-0.58014522,-0.67853641,-0.76082077,-0.84927823,-0.97065889,-1.0480473,-1.1208474,-1.1566561,-1.2047164,-1.178936,-1.1499863,-1.1165428,-1.114627,-1.0777776,-1.0038423,-1.0340455,-0.99362472,-0.94457104,-0.89121274,-0.78771278,-0.76048964,-0.78047535,-0.67612393,-0.57077913,-0.46231231,-0.40573738,-0.2705441,-0.093794742,0.069071054,0.24364446,0.32026896,0.5164624,0.75629092,0.97430072,1.0208237,1.2807136,1.480074,1.4674534,1.3760277,1.3685395,1.3075252,1.2284267,1.1709152,1.130466,1.0629356,1.0759204,1.1743163,1.2481948,1.2557728,1.3408221,1.3719146,1.4219333,1.4352421,1.5201802,1.555769,1.5912584,1.6046453,1.5829117,1.5966841,1.5961945,1.644858,1.6287346,1.5925758,1.629463,1.535069,1.5550121,1.5532832,1.4915072,1.3918081,1.2690344,1.1942098,1.1657047,1.0250833,0.88864599,0.72980335,0.66441342,0.49862191,0.33398933,0.21225861,0.11178607,0.0073636969,-0.14438579,-0.15725233,-0.19805156,-0.25836346,-0.33523158,-0.41046772,-0.49873597,-0.58364567,-0.62477603,-0.74707911,-0.86862534,-0.9857487,-1.0164959,-1.0834303,-1.2057334,-1.3258842,-1.4169433,-1.494048,-1.5946151,-1.663489,-1.7507875,-1.810177,-1.8710565,-1.9360515,-2.027489,-2.0306584,-2.0331182,-2.0776307:0
-1.6335956,-1.6431746,-1.613675,-1.5989067,-1.5667659,-1.5238929,-1.4888319,-1.415548,-1.3956646,-1.3384324,-1.2846971,-1.2433679,-1.1599469,-1.1308938,-1.0457058,-0.97880165,-0.87339552,-0.79092317,-0.7466366,-0.62409988,-0.58191511,-0.48164257,-0.442843,-0.34621606,-0.2836829,-0.18703736,-0.09290282,-0.035391657,0.039436095,0.10485225,0.22482218,0.24191556,0.35548709,0.46552462,0.46500382,0.56280442,0.60552859,0.69751297,0.75374818,0.82739483,0.88188349,0.95456295,1.0193616,1.0548206,1.1251304,1.1599347,1.205633,1.2519117,1.2850215,1.325668,1.3569514,1.4611522,1.4485228,1.4765995,1.4830481,1.4841046,1.4786771,1.4680249,1.46554,1.4500834,1.4627221,1.4424778,1.3998243,1.401158,1.3702094,1.2771109,1.1847508,1.0707236,1.0445013,1.0194323,0.96856316,0.88906495,0.83749276,0.8059602,0.72459084,0.67257039,0.59269274,0.57141063,0.52487718,0.52901196,0.47473162,0.45735923,0.46377622,0.43167264,0.41636485,0.41954545,0.40544666,0.3506883,0.31025192,0.26546315,0.13111544,0.072897473,-0.052503646,-0.11248861,-0.20801815,-0.27060711,-0.39652903,-0.45954579,-0.56515652,-0.66265765,-0.70686983,-0.82803015,-0.88710371,-1.0017168,-1.0571448,-1.1308938,-1.1870471,-1.2004577,-1.1966261,-1.1619929,-1.1293314,-1.1326608,-1.0842636,-1.039326,-0.98923625,-0.95112487,-0.91455729,-0.78339018,-0.78450618,-0.73973601,-0.76858459,-0.76638979,-0.73679721,-0.73395141,-0.78043278,-0.77645238,-0.76756159,-0.76272559,-0.79752617,-0.80641696,-0.83522834,-0.83786954,-0.86960112,-0.91704969,-0.94355467,-0.99208204,-0.98017805,-1.012077,-1.0181964,-1.0049346,-0.98958964,-0.94502407,-0.84292874,-0.78372498,-0.68060664,-0.62409988,-0.52243234,-0.39652903,-0.33349367,-0.20478175,-0.16471737,-0.063366039,-0.0023022784,0.11686785,0.23149957,0.28690894,0.36000689,0.42549745,0.5057378,0.52106419,0.53928659,0.53928659,0.54931199,0.58449201,0.56124388,0.55635022,0.57523107,0.61465933,0.63524951,0.66028882,0.68226284,0.78100088,0.85695393,0.85791555,0.90927942,0.95781237,1.0819691,1.1068504,1.1781943,1.2627127,1.2465976,1.320979,1.3614302,1.4008808,1.3975458,1.4627221,1.4810598,1.5010901,1.4740383,1.4737333,1.4735361,1.4778532,1.4653521,1.4569412,1.39284,1.3611977,1.3281828,1.3178933,1.284151,1.2156677,1.1392162,1.1548383,1.1272545,1.0542924,0.94589163,0.90803136,0.79341079,0.73435025,0.67720365,0.61465933,0.51142939,0.40659986,0.3421137,0.26021795,0.20549679,0.10511265,0.079667869,-0.048727849,-0.11605981,-0.23859653,-0.34223566,-0.40406202,-0.52700794,-0.5858769,-0.65834246,-0.69876023,-0.79304357,-0.9071359,-0.94883707,-1.0459662,-1.0882998,-1.1466851,-1.1965703,-1.2838973,-1.307203,-1.355563,-1.4337388,-1.4684463,-1.5113193,-1.5197823,-1.5369501,-1.5437391,-1.5793953,-1.5886581,-1.5923037,-1.5975489,-1.5991113,-1.6235516,-1.6465226,-1.6430444,-1.6402358:1
-1.7170132,-1.7280588,-1.6833033,-1.6668214,-1.6468486,-1.5914604,-1.563773,-1.5561249,-1.5037746,-1.4455085,-1.3810332,-1.346857,-1.2890971,-1.207274,-1.1178427,-1.0861181,-0.96764043,-0.85686405,-0.73821314,-0.62907562,-0.56444052,-0.44726859,-0.31737216,-0.16767615,-0.10305438,0.0060165216,0.097099914,0.21912714,0.24117849,0.35295418,0.47501338,0.57388337,0.62957934,0.69971595,0.74631824,0.80293358,0.87109556,0.86110917,0.92136065,0.99317742,1.0441087,1.0759279,1.1457874,1.1966507,1.2076018,1.2285699,1.2531422,1.256697,1.272029,1.2874623,1.3186247,1.285569,1.30129,1.3005226,1.3164169,1.3157906,1.2991675,1.315219,1.315219,1.3147061,1.2975966,1.2314612,1.2310322,1.1813067,1.115711,1.0992144,1.0802876,1.0638417,1.0279293,0.9589985,0.93841946,0.91738074,0.89607554,0.87452785,0.82987753,0.80706405,0.72817218,0.68875557,0.64066764,0.63262656,0.55168545,0.51802217,0.48378196,0.45825702,0.40691136,0.31300992,0.26127786,0.16757096,0.12766535,0.077886594,0.011546014,-0.04522788,-0.070583599,-0.12056221,-0.20309155,-0.2789322,-0.28134385,-0.36300712,-0.41574382,-0.49350314,-0.53292908,-0.59100873,-0.64967465,-0.72432945,-0.78200938,-0.80503339,-0.85333317,-0.88761602,-0.91756854,-0.92762822,-0.98157741,-1.0071197,-1.0606691,-1.0872507,-1.1043854,-1.1369228,-1.1620787,-1.1741636,-1.1847429,-1.2128434,-1.2204914,-1.2255279,-1.2466999,-1.2503773,-1.2521761,-1.2370266,-1.2364004,-1.2338155,-1.2456207,-1.2395582,-1.2042361,-1.1963749,-1.1730044,-1.1447307,-1.1154711,-1.1098483,-1.0705423,-1.0557525,-1.0573514,-1.0491571,-1.0066134,-0.97980531,-0.93145223,-0.87862227,-0.82168848,-0.76158357,-0.70353057,-0.66630309,-0.60761053,-0.55131631,-0.48931938,-0.4077094,-0.36591177,-0.30304878,-0.23379022,-0.14703715,-0.10349407,-0.075846609,-0.0062816017,0.062963628,0.089878264,0.15885701,0.21076229,0.2645849,0.28820049,0.34129827,0.37793549,0.45609986,0.50734026,0.53264934,0.58256667,0.63145804,0.663176,0.68661439,0.76477209,0.78749497,0.83135517,0.86905032,0.90636573,0.92727254,0.94778096,0.96421354,1.0298586,1.082109,1.1821102,1.2153364,1.2647488,1.2819315,1.26588,1.2665528,1.2506586,1.2514886,1.2523907,1.2689925,1.2689925,1.2699412,1.2864857,1.2709525,1.2555192,1.256697,1.2731656,1.2579388,1.2706647,1.2555045,1.2459138,1.2036299,1.1601628,1.1533741,1.1248766,1.0924112,1.0230114,1.0029266,0.95961141,0.91035895,0.83923903,0.81004464,0.72958987,0.65945725,0.59783606,0.47999126,0.43422172,0.35229863,0.24572067,0.12073683,0.086627189,-0.022816782,-0.15301966,-0.30171637,-0.36665792,-0.51607412,-0.66862148,-0.79846462,-0.84561853,-0.95151829,-1.0217762,-1.1154711,-1.2025572,-1.2425428,-1.31853,-1.3673228,-1.4290532,-1.4566074,-1.5092375,-1.5393899,-1.5816939,-1.6158834,-1.6514854,-1.6987725,-1.715321,-1.7319761,-1.7176261:2
-2.2452953,-2.2238504,-2.1718719,-2.0926266,-2.0646897,-1.9970254,-1.9270575,-1.87399,-1.7652581,-1.6741804,-1.5518989,-1.4658474,-1.429743,-1.3311681,-1.2009704,-1.0396945,-0.87693171,-0.74415814,-0.63542622,-0.46045412,-0.37940779,-0.22755588,-0.082845253,0.082242134,0.22059261,0.35303948,0.42712252,0.48765177,0.59163609,0.67114317,0.72300025,0.74921779,0.82434376,0.84736971,0.80576384,0.79235245,0.76264384,0.78562791,0.94986923,1.0601174,1.1364873,1.215563,1.2280089,1.3933853,1.4246164,1.4776295,1.4980461,1.4685636,1.4596129,1.4596129,1.4596129,1.45079,1.4210562,1.382466,1.4037224,1.3953036,1.3055705,1.2341052,1.1484432,1.0473489,0.99514418,0.99431277,0.83740122,0.70451876,0.65579672,0.59295545,0.440247,0.3569452,0.2487515,0.18184953,0.14563418,0.10707959,0.1153727,0.10988584,0.14284887,0.12439879,0.19580961,0.26966438,0.34675472,0.27101096,0.20485454,0.0067036075,-0.16349368,-0.29522013,-0.4407475,-0.59588734,-0.66987615,-0.77215787,-0.84958119,-0.93236572,-0.97492028,-1.0138937,-1.0790659,-1.0827517,-1.1125106,-1.1418506,-1.1093902,-1.163086,-1.2113368,-1.1476935,-1.0023336,-0.87795788,-0.74847223,-0.71106946,-0.64011728,-0.45701959,-0.27180675,-0.1783417,-0.091640978,0.037802779,0.092252507,0.16920673,0.22838311,0.25451898,0.28346948,0.30773731,0.33385014,0.294261,0.32254135,0.24364998,0.20044202,0.13572852,0.19282744,0.22720197,0.19938235,0.22248997,0.21406493,0.22019261,0.21205657,0.11474443,0.15028963,0.20396241,0.2520478,0.32233193,0.32492248,0.39009461,0.36369487,0.3669451,0.25450851,0.22883127,0.13786463,0.15493462,0.054807848,-0.16460361,-0.33218312,-0.45701959,-0.54064181,-0.65270354,-0.78432529,-0.81511032,-0.88365416,-0.9477373,-0.98239664,-0.99004055,-1.0545635,-0.99887816,-1.0003022,-0.97326584,-0.96978944,-0.93433429,-0.86252347,-0.78583312,-0.74043043,-0.65261977,-0.60129043,-0.49262134,-0.33972232,-0.14213263,0.0023476293,0.20083155,0.34929292,0.45571491,0.4982569,0.44646684,0.42440213,0.37536387,0.30074261,0.25723518,0.24501541,0.20057186,0.20753933,0.32490363,0.35660594,0.50057102,0.58463093,0.71656262,0.88752429,0.92225903,1.0209366,1.08098,1.1434548,1.1994919,1.1929286,1.2116363,1.2943475,1.3548433,1.3930209,1.4840546,1.4840546,1.5446383,1.5525879,1.5305148,1.5305148,1.5305148,1.4784211,1.486976,1.4655144,1.4426456,1.3261776,1.2429491,1.1662922,1.0618367,0.97467736,0.83691117,0.79600896,0.83018035,0.75709416,0.7166757,0.70291877,0.67415256,0.6365634,0.56682586,0.50576678,0.41514358,0.27664442,0.2373003,0.076524913,-0.073651626,-0.21469736,-0.41258024,-0.55599245,-0.69749891,-0.77862901,-0.91355962,-1.0291396,-1.1255785,-1.2317764,-1.3593144,-1.4781824,-1.5686108,-1.6406101,-1.7183266,-1.8089226,-1.8704089,-1.905529,-1.9796434,-2.0418836,-2.1231603,-2.1303226,-2.2027407,-2.2272012:0
-1.8441798,-1.8399126,-1.8257454,-1.792737,-1.7396792,-1.6979,-1.6676882,-1.6327234,-1.5597346,-1.5130973,-1.4432465,-1.3670014,-1.2988443,-1.2082614,-1.1731522,-1.072118,-0.96098686,-0.85193028,-0.73580983,-0.62362834,-0.49868463,-0.37036655,-0.24705094,-0.11911362,-0.038365005,0.080785813,0.178468,0.25107873,0.33158576,0.40432516,0.43734412,0.51340669,0.58348861,0.64791419,0.70706682,0.76135483,0.81119051,0.84061321,0.89163714,0.88637732,0.92800816,0.95200034,0.97173189,1.0184558,1.0337613,1.0163445,1.0318364,1.0638273,1.0794899,1.0630789,1.0788203,1.0946392,1.0946392,1.1105289,1.1264869,1.1264869,1.126097,1.1096899,1.12577,1.1093735,1.0929927,1.109128,1.109128,1.109128,1.0927668,1.1415403,1.1578095,1.1088444,1.1251136,1.1251136,1.1251136,1.1414484,1.1052126,1.0673172,1.0072587,0.96100086,0.91628057,0.85835952,0.82470376,0.7572662,0.74502523,0.67637447,0.63995618,0.53960995,0.47439001,0.47419963,0.40758268,0.34020682,0.29036983,0.2417631,0.21088037,0.16496395,0.10279145,0.05964937,0.018040856,-0.022044594,-0.052387692,-0.11078929,-0.15726898,-0.24263931,-0.30087022,-0.3740823,-0.46008285,-0.54782968,-0.63658751,-0.71033791,-0.81654531,-0.90493551,-0.96400673,-1.0486024,-1.1297055,-1.1997139,-1.2577347,-1.2791758,-1.2674114,-1.2691315,-1.2521677,-1.2457997,-1.2372916,-1.22642,-1.2129488,-1.1904967,-1.1972192,-1.1948427,-1.1580397,-1.1575014,-1.201749,-1.1972192,-1.2163232,-1.2323941,-1.2456028,-1.256146,-1.282839,-1.2665974,-1.2707464,-1.2558309,-1.2572489,-1.2475591,-1.2233083,-1.1632654,-1.0842762,-1.0184956,-0.93363737,-0.8466652,-0.77472672,-0.68539118,-0.59511029,-0.50589292,-0.41851373,-0.32745818,-0.24455626,-0.16533071,-0.070927048,-0.013129422,0.016294586,0.013209069,0.07353288,0.087655353,0.13214587,0.17806229,0.20896078,0.25756751,0.29122721,0.35836804,0.39396045,0.42525284,0.49047277,0.56595894,0.62107414,0.68841192,0.74401686,0.78807803,0.87973099,0.93192348,0.98053152,0.99201095,1.0184085,1.0563039,1.0763112,1.1415403,1.1579211,1.1416926,1.1580879,1.1580879,1.141904,1.1744949,1.1583111,1.1583111,1.1421758,1.126097,1.126097,1.1100759,1.0941179,1.0941179,1.0782282,1.0624093,1.0952326,1.0794899,1.0958957,1.0802331,1.1122923,1.0810511,1.0655592,1.0501578,1.0665386,1.0523833,1.0372748,1.0024925,0.9674358,0.95767113,0.9366883,0.89385609,0.87418231,0.7960833,0.74557012,0.69071752,0.6474599,0.61559111,0.5455302,0.50248134,0.42059437,0.33141901,0.26756589,0.17943042,0.099067824,-0.017987469,-0.12911857,-0.25425923,-0.35422995,-0.48254804,-0.5914208,-0.70370733,-0.82703607,-0.93902061,-1.0362735,-1.1396186,-1.2372916,-1.310438,-1.3517051,-1.428239,-1.4987332,-1.5597346,-1.6184644,-1.6701435,-1.6996594,-1.7564592,-1.7942207,-1.8266777,-1.8288835,-1.8439566,-1.8447837:1
-1.8337093,-1.8276812,-1.7764496,-1.7743909,-1.7168053,-1.6713501,-1.6217181,-1.6134387,-1.5545942,-1.4930541,-1.4256191,-1.3448542,-1.3053974,-1.211421,-1.1273977,-1.0165218,-0.95621099,-0.8289096,-0.68076899,-0.5554671,-0.46474912,-0.31653446,-0.16276563,-0.0067010897,0.12531023,0.19723144,0.31717912,0.42711598,0.56125714,0.63416033,0.73853562,0.84788004,0.93020605,0.98651932,1.0378057,1.0829781,1.1411472,1.1736768,1.1968532,1.2765843,1.296643,1.3305308,1.3634277,1.359368,1.3538523,1.4343625,1.4102041,1.3737481,1.4074804,1.3722477,1.3708214,1.3355029,1.3340025,1.332591,1.2785734,1.224627,1.2061146,1.169112,1.1675598,1.1477204,1.1648775,1.110977,1.0744128,1.0200013,1.0191571,0.94847405,0.90902025,0.85632829,0.79920336,0.78204915,0.75918525,0.72944753,0.70587863,0.64743848,0.5979857,0.56480292,0.47966428,0.43776813,0.41165616,0.34369247,0.29609701,0.27411882,0.27716842,0.22293462,0.16858826,0.13196041,0.090341227,0.038532005,0.015634047,-0.0084487993,-0.080223382,-0.089213719,-0.13250656,-0.22215814,-0.29285151,-0.31237254,-0.38202914,-0.42616621,-0.46971084,-0.51341839,-0.53396138,-0.57556576,-0.617259,-0.67659226,-0.69867561,-0.76097109,-0.80583391,-0.85638419,-0.88258502,-0.91154072,-0.94818337,-0.9723699,-1.0099308,-1.0375535,-1.0532237,-1.0738852,-1.0828311,-1.0870078,-1.1004859,-1.1074175,-1.1132679,-1.1017893,-1.1418237,-1.1453487,-1.148622,-1.1276495,-1.1279753,-1.1473926,-1.1450525,-1.1414978,-1.1392762,-1.1122459,-1.0842826,-1.0670128,-1.0656206,-1.0212317,-1.0125672,-0.9861146,-0.93251323,-0.90606061,-0.86044243,-0.82791725,-0.80485637,-0.79998352,-0.77941091,-0.75411355,-0.71250918,-0.68931499,-0.64959163,-0.60789839,-0.5271779,-0.46400857,-0.42074535,-0.3508814,-0.28606803,-0.21420458,-0.18702621,-0.14186717,-0.051800884,0.0026743356,0.045285866,0.055194491,0.093466369,0.16497435,0.20350246,0.25991349,0.28808272,0.3722068,0.41001509,0.48124314,0.49773974,0.5348534,0.56372615,0.59814566,0.62368,0.65649398,0.69823462,0.72256333,0.76394702,0.78754258,0.80555584,0.85142433,0.90470578,0.92268201,0.92496588,0.94478165,1.0003144,1.0398111,1.041661,1.1153714,1.1541173,1.1911376,1.2448412,1.2633373,1.3002702,1.283587,1.3186967,1.3020135,1.3204059,1.322201,1.3240791,1.3769636,1.344237,1.3055919,1.2940659,1.2707073,1.2431157,1.2610401,1.192992,1.1720017,1.1512039,1.088824,1.0391861,1.0208263,0.95501167,0.92827616,0.89543995,0.81531636,0.81026725,0.69936175,0.61566423,0.48763117,0.39939553,0.3344459,0.18630233,0.061015252,-0.087273465,-0.14373337,-0.31453496,-0.43662284,-0.56900444,-0.71068741,-0.77813715,-0.88876125,-1.0222092,-1.150266,-1.2001794,-1.3088336,-1.3911537,-1.4648389,-1.4987563,-1.5613036,-1.6202666,-1.6703725,-1.7175755,-1.7567212,-1.7944451,-1.8133589,-1.8150029,-1.8327318,-1.8168543:2
-2.10559,-2.1215382,-2.0359098,-2.0025698,-1.9300248,-1.8515471,-1.7441958,-1.6991033,-1.640386,-1.5623595,-1.4798215,-1.3870875,-1.3257536,-1.2207934,-1.0678533,-0.95978016,-0.89919063,-0.7847337,-0.65320073,-0.49712516,-0.35623081,-0.2981226,-0.18271826,-0.089961688,0.0069003583,0.03733047,0.10098783,0.12437999,0.19279699,0.1829619,0.23152827,0.31942595,0.53565119,0.672413,0.80147141,0.90322167,0.9704341,1.0855542,1.161237,1.2293427,1.3019531,1.4256902,1.5464926,1.6188775,1.5676222,1.5958394,1.6196625,1.6097214,1.5999562,1.5673087,1.5019415,1.4365765,1.3728808,1.3079918,1.2623444,1.2335361,1.1777965,1.1183777,1.0310281,0.90479168,0.84412094,0.77648443,0.7237765,0.62108784,0.5080543,0.39310562,0.33258376,0.35686244,0.3785109,0.41627447,0.49153542,0.51508774,0.62423236,0.70969383,0.8021143,0.76470263,0.69636684,0.39996763,0.21142951,0.0099681828,-0.065080729,-0.17795862,-0.34429787,-0.46538671,-0.60725103,-0.64936595,-0.7704999,-0.8853403,-0.95754696,-0.92371066,-0.92391368,-0.96020875,-0.96217126,-0.96056967,-0.95820113,-0.9498774,-0.91340187,-0.9001606,-0.82734488,-0.82283338,-0.71897849,-0.61128883,-0.52789363,-0.41235395,-0.28612199,-0.20500511,-0.11718863,-0.069682466,0.0025918695,0.054722328,0.16234432,0.18088661,0.17310426,0.15760724,0.14350878,0.095664251,0.0043964722,-0.038620743,-0.13918223,-0.20137334,-0.22952514,-0.19507979,-0.073900725,-0.0040400452,0.026525412,-0.0518169,-0.12014367,-0.20448628,-0.27154983,-0.26552697,-0.23083348,-0.19115478,-0.13530233,-0.063073109,0.0022083915,0.032683618,0.018269355,0.028758608,-0.0074687902,-0.02759011,-0.056080274,-0.15404764,-0.16036375,-0.23442013,-0.25566933,-0.38814972,-0.54812774,-0.63048529,-0.80559942,-0.8422103,-0.91640202,-0.92134212,-0.93090652,-0.92903424,-0.93632032,-0.97175821,-0.90437886,-0.83377378,-0.83111199,-0.78730526,-0.74255112,-0.68489406,-0.58688158,-0.54131537,-0.4475437,-0.28483622,-0.10798516,-0.035169441,0.089167681,0.26238698,0.48940824,0.7324792,0.8755526,1.063705,1.0705354,1.0628794,1.0335568,0.96998295,0.85821714,0.78243511,0.7373223,0.70795013,0.69372987,0.6836489,0.68689945,0.74392489,0.84595487,0.9122289,0.99005013,1.039485,1.0955743,1.2036203,1.2624278,1.4093338,1.4459672,1.5483378,1.5591744,1.6275102,1.6274809,1.638489,1.7064481,1.6492038,1.5920159,1.5909129,1.555669,1.5400885,1.5010956,1.4932139,1.4397729,1.3287943,1.2226318,1.0735085,0.89724167,0.85021598,0.723384,0.59005996,0.42841042,0.31942595,0.21833211,0.18602973,0.09731095,0.029390219,-0.024905763,-0.052425953,-0.13320448,-0.21835917,-0.246917,-0.37547238,-0.464913,-0.5604216,-0.69993994,-0.76989085,-0.89882971,-1.0069705,-1.1126526,-1.2030632,-1.2833905,-1.3794856,-1.5322001,-1.637228,-1.686832,-1.7790923,-1.8439903,-1.8924665,-1.9450706,-1.9807792,-1.9961409,-2.0303832,-2.084025,-2.0851078,-2.0851078:0
-1.9005352,-1.8827306,-1.8684585,-1.8184211,-1.7953105,-1.7538421,-1.7082452,-1.6736574,-1.6180445,-1.5586295,-1.4762459,-1.4429349,-1.3813919,-1.3024982,-1.2142837,-1.1258848,-1.0361664,-0.96435205,-0.86471705,-0.7381552,-0.63698801,-0.53867239,-0.44459868,-0.32842168,-0.24425046,-0.13211675,-0.032864794,0.072707451,0.1609177,0.22519313,0.3154392,0.41619497,0.44915695,0.52673975,0.56543184,0.64878872,0.7275235,0.76763996,0.83711207,0.90214651,0.95601155,1.0330666,1.0115123,1.043162,1.0414795,1.0789926,1.1115304,1.1445023,1.1611436,1.1778828,1.2116392,1.176196,1.1932061,1.1932061,1.2102972,1.1925649,1.2097339,1.2097339,1.26202,1.2793947,1.2442877,1.2616625,1.2790954,1.2965822,1.27885,1.296385,1.296385,1.2609418,1.2432421,1.2079137,1.1866972,1.1460927,1.103624,1.0554976,1.0280104,0.99166621,0.93376072,0.86419072,0.81408664,0.74167215,0.66452064,0.58265055,0.49621083,0.43983328,0.34701228,0.28809952,0.2313829,0.17632899,0.12302717,0.071537027,0.021896862,-0.025870624,-0.0033275481,-0.048328577,-0.091513676,-0.10230995,-0.10527503,-0.16409415,-0.22115409,-0.29408924,-0.36722301,-0.4355474,-0.51780338,-0.60183273,-0.68837317,-0.7552363,-0.83983313,-0.9238341,-0.97494971,-1.0444942,-1.1028593,-1.1190325,-1.1354609,-1.1520171,-1.1341274,-1.1237567,-1.1048455,-1.0909281,-1.0459838,-1.0125735,-0.98896642,-0.96259287,-0.93345286,-0.90167407,-0.90405748,-0.8690157,-0.86998041,-0.90680975,-0.91963476,-0.95110143,-0.97988677,-1.0058773,-1.0291155,-1.0899634,-1.1059237,-1.1196283,-1.1380997,-1.1718505,-1.1567556,-1.1415613,-1.1263955,-1.0902471,-1.0395004,-0.95724439,-0.87321504,-0.80437992,-0.71978309,-0.65290577,-0.5689048,-0.48235017,-0.39510038,-0.30139553,-0.24644944,-0.20713738,-0.14810545,-0.13560674,-0.094322694,-0.08342711,-0.039447542,-0.014818984,0.0017797567,0.032863381,0.083645595,0.13638277,0.19103803,0.26748303,0.32524948,0.40283512,0.47866157,0.52884225,0.61361216,0.67620218,0.7518442,0.8228556,0.89658947,0.95754658,0.99678628,1.0539328,1.0804993,1.1242306,1.1660934,1.1885202,1.2254928,1.2608212,1.2608212,1.2432421,1.2434067,1.2434067,1.2436351,1.2436351,1.2262022,1.2262022,1.2088274,1.2088274,1.2265554,1.2092445,1.2097339,1.2097339,1.1925649,1.1754724,1.1584637,1.1592723,1.1769989,1.1601661,1.1267856,1.0938137,1.0612759,1.0291978,0.99760203,0.99381269,0.9364832,0.92256438,0.89431105,0.82825232,0.76763996,0.69362944,0.61506349,0.58148296,0.5091238,0.41595805,0.36786143,0.28325183,0.23933043,0.14333864,0.055128392,-0.050442434,-0.12258311,-0.21140765,-0.32842168,-0.42012617,-0.53867239,-0.63698801,-0.74854005,-0.84733803,-0.94905851,-1.061178,-1.1431219,-1.2314499,-1.3196644,-1.3843569,-1.4575049,-1.4913266,-1.5572818,-1.6348702,-1.6743525,-1.724319,-1.7700861,-1.7953105,-1.8327074,-1.866146,-1.8985065:1
-2.1888124,-2.1855193,-2.1764684,-2.0963777,-2.0538159,-1.9980195,-1.9039072,-1.8252663,-1.7942407,-1.7251062,-1.6520781,-1.5280793,-1.4444055,-1.325336,-1.2862123,-1.1669564,-1.0559229,-0.93113712,-0.8068898,-0.66064705,-0.51887794,-0.39763377,-0.28191953,-0.14891132,-0.081495912,0.026058064,0.14394286,0.27042078,0.40530337,0.49581191,0.5963696,0.64879828,0.76253045,0.82694064,0.81833093,0.88638839,0.88885097,0.94854311,0.95219245,0.98126289,1.0040246,1.0080675,1.0063899,0.94475087,0.86182889,0.7767902,0.78496497,0.78496497,0.77244289,0.76042203,0.81388628,0.86994152,0.89235533,0.93774837,0.9039164,0.96072138,0.95004262,0.97337187,0.99687302,1.0543739,1.0443745,1.0443745,1.010849,1.034839,1.0016346,0.98467197,0.85215669,0.7999869,0.72331353,0.59980975,0.55240564,0.45603372,0.38231793,0.38197826,0.30675261,0.23030292,0.23066537,0.22953453,0.32705593,0.3755681,0.40086907,0.48200988,0.5387403,0.59476447,0.71655335,0.87022733,1.0083057,1.1249913,1.0874975,1.0387679,0.95299605,0.83071217,0.76932377,0.62401302,0.5336101,0.44535495,0.33452444,0.15728924,0.12980944,0.0038140877,-0.12606671,-0.25892994,-0.39543837,-0.52896436,-0.62871016,-0.76059996,-0.85690768,-0.89534793,-0.94470304,-0.98666421,-0.99919457,-1.0476177,-1.0197195,-1.0224741,-1.047162,-1.1306494,-1.1350195,-1.1370907,-1.1128791,-1.0105651,-0.95750265,-0.9561357,-0.92788544,-0.92788544,-0.89891028,-0.92448878,-0.92448878,-1.0027569,-1.0779598,-1.1550474,-1.2140333,-1.193032,-1.1756552,-1.1336112,-1.139576,-1.1423513,-1.1304216,-1.1363658,-1.0985054,-1.0192431,-0.88646276,-0.79357241,-0.69722327,-0.56436004,-0.42785161,-0.36111968,-0.22757298,-0.12880061,0.0020329127,0.13774395,0.28361183,0.40125637,0.53848555,0.63025128,0.67825187,0.74186053,0.84207027,0.99575668,1.0997877,1.2388063,1.2107528,1.0537277,0.87488946,0.83223238,0.69795043,0.63249432,0.53980901,0.42643722,0.34578313,0.32449187,0.30289202,0.2805362,0.33296695,0.38477222,0.46236517,0.51386392,0.56905549,0.66926522,0.76719671,0.83755313,0.86640195,0.93132992,0.93132992,0.96443492,0.96443492,0.99795829,0.99795829,0.97338429,0.94894699,0.9828763,0.9828763,0.9585819,0.93443662,0.87940453,0.84547521,0.87940453,0.83174567,0.86607057,0.84250521,0.81912211,0.81912211,0.77291718,0.70505856,0.78244026,0.88529276,0.9843758,0.99893587,1.0104617,1.0084175,1.0972609,1.0903826,1.107629,1.0552893,1.0683064,0.98086937,0.88791896,0.80993663,0.79384599,0.72394523,0.65430128,0.53031079,0.42582209,0.3315855,0.21635383,0.073487028,-0.061944409,-0.20913989,-0.35090899,-0.42588403,-0.54306878,-0.66387802,-0.80374168,-0.93672918,-1.0463129,-1.1621928,-1.2267915,-1.3378457,-1.4701083,-1.5028115,-1.580624,-1.6826066,-1.7729494,-1.8618632,-1.9176388,-1.9461584,-2.0148371,-2.0985938,-2.1292259,-2.1598579,-2.1877354,-2.1893095:2
-2.1644563,-2.1785406,-2.0660474,-2.0460694,-1.9790934,-1.8481032,-1.7500571,-1.7210422,-1.6390449,-1.5723106,-1.5151271,-1.4452798,-1.3163448,-1.1140868,-1.0067619,-0.93730753,-0.80272073,-0.66426528,-0.55198368,-0.4989106,-0.39321779,-0.3202272,-0.27755112,-0.29326753,-0.28456306,-0.21510865,-0.11972218,-0.0077730442,-0.0078032681,0.0011732152,0.042791456,0.12986637,0.26578302,0.46952803,0.56806685,0.73561578,0.79488777,0.9765059,1.2211891,1.3026061,1.3760047,1.4750906,1.4791285,1.4597701,1.5071581,1.5040511,1.6391668,1.5970982,1.6107141,1.5963396,1.6553668,1.5259422,1.4932944,1.4725911,1.4284915,1.4577572,1.3431272,1.2843146,1.0417924,0.85161491,0.75233863,0.71785322,0.61398594,0.47821739,0.36899746,0.29494903,0.21518829,0.34663181,0.44653675,0.55199985,0.58451466,0.65794351,0.65483952,0.77215641,0.85477633,0.8947111,0.75835016,0.60302979,0.48946066,0.23380618,-0.051114044,-0.22541498,-0.34993724,-0.54333965,-0.71159582,-0.77473345,-0.82641623,-0.9262456,-0.92866351,-0.92923776,-0.88344863,-0.97723324,-1.0607115,-1.0136228,-1.0041627,-1.0041627,-0.9932821,-0.98291532,-0.88151431,-0.82898525,-0.72033052,-0.61418436,-0.50317216,-0.39853719,-0.12960538,2.06052E-4,0.13370479,0.2017689,0.40608212,0.58053418,0.72158587,0.7914755,0.74843371,0.69930182,0.61331799,0.60581946,0.63976386,0.54909231,0.48972361,0.38344446,0.46001658,0.39338811,0.53975617,0.55727391,0.58436052,0.63516379,0.82034532,0.78158927,0.74964871,0.66041582,0.51992328,0.35787509,0.31846319,0.32958556,0.38099633,0.46882381,0.47625284,0.45307719,0.42760755,0.4437894,0.30540648,0.27092107,0.25100355,0.15168798,0.019095958,4.1761894E-4,-0.17890048,-0.25999107,-0.37405587,-0.47328077,-0.61723697,-0.76146518,-0.85733523,-0.90354749,-1.0709876,-1.0725593,-1.0695973,-1.0711992,-0.98763024,-0.9847892,-0.97430152,-1.008394,-0.96632243,-0.90729525,-0.84376472,-0.77829986,-0.72256708,-0.69210144,-0.56918105,-0.46648041,-0.40198271,-0.26824218,-0.16173333,0.090545138,0.2039148,0.48442839,0.78275591,1.0078903,0.96906177,0.92843789,0.78873721,0.68648993,0.66025865,0.60062398,0.59705152,0.60344688,0.74487636,0.70568812,0.78135353,0.83916268,0.83175784,0.84917585,0.92792711,0.98621682,1.0959929,1.1497188,1.2683172,1.310685,1.3496707,1.367938,1.4668637,1.3768933,1.3469354,1.3677627,1.3422326,1.3777305,1.3258876,1.3151581,1.2441381,1.1624249,1.0750749,0.94175452,0.86251665,0.76237597,0.71666542,0.56583935,0.49754856,0.37244298,0.17852676,0.036988477,-0.095633774,-0.29837536,-0.50562029,-0.55107696,-0.60354556,-0.62784554,-0.66870818,-0.71068911,-0.72837006,-0.76098159,-0.830436,-0.94181088,-1.054032,-1.1174114,-1.2131002,-1.2687725,-1.3125971,-1.356059,-1.4599081,-1.5092032,-1.6375639,-1.6703265,-1.783666,-1.8633361,-1.963921,-2.0124907,-2.0641735,-2.0725455,-2.1175186,-2.0920097,-2.1318145:0
-2.0537427,-2.0368519,-2.0330295,-2.0135432,-1.9432683,-1.9160468,-1.8441062,-1.7890046,-1.7276529,-1.6734037,-1.5394527,-1.4378112,-1.2973907,-1.2000751,-1.0521002,-0.95026499,-0.8104643,-0.696258,-0.52955865,-0.4236686,-0.28611484,-0.18431705,-0.060179037,0.014478615,0.11212087,0.18844564,0.27358641,0.3140674,0.38703469,0.45696344,0.52745265,0.60121282,0.65994822,0.6909004,0.72579246,0.76491238,0.77977185,0.79371835,0.80886579,0.80801221,0.85482853,0.87031172,0.8697784,0.83754263,0.85317045,0.8849917,0.90074736,0.90074736,0.94854123,0.94854123,0.93243044,0.96445831,0.94834753,0.94834753,0.94834753,0.96430981,0.91608593,0.93204821,0.94818353,0.99634671,0.99634671,1.0285231,0.99634671,0.98022043,0.96418455,0.98022043,0.98022043,0.94794334,0.96408382,0.98014941,0.98014941,1.0123761,0.98014941,0.98014941,0.98014941,1.0284869,1.0284779,0.99621112,0.98006935,0.98006935,0.94782324,0.89949605,0.8659754,0.79686277,0.7613302,0.71758211,0.67119323,0.59840931,0.5946231,0.51091055,0.42270285,0.31277219,0.242877,0.18262169,0.090644555,0.075816074,0.013309951,-0.046392669,-0.10323884,-0.11588883,-0.15284187,-0.23524758,-0.33197039,-0.40123798,-0.50501024,-0.59053582,-0.71137962,-0.80283247,-0.90231746,-0.98040492,-1.0653236,-1.1426879,-1.2444198,-1.3026593,-1.3466295,-1.365212,-1.3916328,-1.4132111,-1.4169044,-1.4029579,-1.3970694,-1.3969144,-1.3797137,-1.3432075,-1.3456869,-1.3545971,-1.33657,-1.3565858,-1.3759043,-1.3978313,-1.4118294,-1.4524034,-1.4603968,-1.4643612,-1.4495882,-1.3719398,-1.317923,-1.2911793,-1.2014569,-1.1382973,-1.0376501,-0.96187416,-0.8767618,-0.79897135,-0.68427435,-0.62600899,-0.51769122,-0.43124877,-0.36022496,-0.30708623,-0.21498513,-0.20265539,-0.16114649,-0.10271843,-0.04373767,3.694113E-4,0.090414696,0.1691517,0.25980004,0.31437991,0.32152619,0.40626794,0.46583497,0.55806778,0.60819123,0.69193735,0.76390642,0.78584245,0.81767145,0.86766835,0.88363063,0.91566624,0.91566624,0.93173183,0.98006935,0.96393403,0.96393403,0.98005901,0.98005901,0.96393403,0.96395856,0.96395856,0.96393403,0.96395856,0.96400892,0.96400892,0.94794334,0.94794334,0.93190745,0.91576696,0.88363063,0.89976594,0.96418455,0.96418455,0.98031083,0.96430981,0.96430981,0.93222254,0.91608593,0.91608593,0.91630545,0.91630545,0.90043744,0.90043744,0.88462238,0.86886542,0.86886542,0.86886542,0.86886542,0.85317045,0.83754263,0.80650134,0.82262762,0.82333399,0.77666488,0.77762823,0.74327853,0.72468449,0.68441011,0.63776554,0.61896102,0.55090471,0.51848169,0.42981814,0.37029889,0.27932384,0.19000817,0.12512726,0.03565146,-0.044178017,-0.20489458,-0.3178302,-0.46818116,-0.56269449,-0.73727103,-0.8360587,-0.99083896,-1.085391,-1.2422374,-1.3445892,-1.4736589,-1.5547681,-1.6473702,-1.6975776,-1.8001231,-1.8674666,-1.905729,-1.9461868,-2.0015853,-2.0355735,-2.0528775:1
-1.6537432,-1.6509743,-1.6318785,-1.6127075,-1.5885706,-1.5602654,-1.5116456,-1.5022256,-1.4476468,-1.3876206,-1.3227791,-1.2898693,-1.2325517,-1.1557471,-1.0873242,-1.0130025,-0.98263578,-0.90841941,-0.81452035,-0.72572255,-0.6756581,-0.58038968,-0.48349609,-0.4065109,-0.34735751,-0.257085,-0.16688774,-0.072070756,0.011309799,0.071275782,0.1476741,0.21808786,0.29644391,0.31728378,0.38826936,0.4543448,0.53421468,0.58036667,0.59901255,0.68288969,0.70837485,0.78325032,0.74940001,0.80912673,0.8478616,0.92784885,0.91885621,0.93952754,0.94382824,0.97653491,0.97653491,0.99129391,1.008116,1.0237117,1.0409084,1.0582241,1.0572941,1.0565477,1.074199,1.091954,1.0915974,1.109548,1.1457187,1.1457187,1.1639297,1.1640907,1.1644098,1.1828375,1.2013298,1.1840714,1.162592,1.1407123,1.1541019,1.1254447,1.0765254,1.044848,1.0190844,1.0222746,0.98703685,0.96869795,0.93072752,0.90189419,0.84342698,0.83915637,0.77855988,0.80273438,0.74071586,0.73214004,0.66885148,0.63717409,0.6076636,0.50873403,0.45284904,0.37788178,0.32335111,0.23595276,0.16154829,0.063420765,0.039329036,-0.074177466,-0.18301911,-0.27622596,-0.33268578,-0.42842068,-0.54102431,-0.63916688,-0.74322328,-0.78574872,-0.90841941,-0.99739779,-1.083803,-1.1231232,-1.1960304,-1.2895533,-1.3577505,-1.3754017,-1.3956562,-1.4537863,-1.4709259,-1.468443,-1.4750039,-1.4864704,-1.5138576,-1.5017892,-1.5223447,-1.5060177,-1.5057619,-1.4842132,-1.4996073,-1.5116456,-1.5197113,-1.489179,-1.4825128,-1.4838671,-1.4666523,-1.4450134,-1.382083,-1.3636643,-1.2909678,-1.2141782,-1.1084966,-1.0738563,-0.98544974,-0.89323605,-0.79808802,-0.74408102,-0.63749656,-0.53965495,-0.42562177,-0.33151204,-0.27169654,-0.15936377,-0.06900098,0.035552007,0.085962558,0.16416663,0.26782276,0.32208708,0.36263221,0.44927967,0.51760478,0.58289773,0.66413094,0.69642981,0.70584078,0.75035706,0.79419016,0.8251919,0.83024349,0.89008758,0.91111706,0.93984505,0.97747841,0.99485877,1.0670933,1.1189063,1.0879919,1.1187423,1.1665285,1.194009,1.21645,1.2013298,1.2190097,1.2187915,1.2187915,1.1821422,1.1639297,1.1640907,1.1460483,1.1644098,1.1464591,1.1286032,1.1116277,1.1116277,1.0940848,1.0778285,1.0435569,1.0621049,1.0283329,1.0116417,0.99726041,0.96483063,0.94882716,0.95161253,0.94746984,0.91975607,0.86515317,0.84826187,0.79017387,0.77272731,0.77047162,0.74440561,0.6790931,0.64670996,0.55599956,0.54345109,0.46128942,0.39303354,0.32005862,0.2792035,0.1930135,0.13831429,0.058936483,-0.0016916087,-0.1138137,-0.20226541,-0.27545852,-0.36783773,-0.40720311,-0.52122124,-0.59709288,-0.69496459,-0.74322328,-0.83861208,-0.9226698,-1.0015209,-1.0419848,-1.1134023,-1.1929004,-1.2531674,-1.320868,-1.3377367,-1.4005317,-1.4416427,-1.4949575,-1.5197865,-1.550078,-1.5928141,-1.6152807,-1.6174024,-1.6516966:2
-2.113801,-2.0918377,-2.0488137,-2.00028,-1.9664324,-1.9380004,-1.877526,-1.8313616,-1.7593979,-1.7012176,-1.636249,-1.544616,-1.4467777,-1.3600338,-1.2869042,-1.1625519,-1.06351,-0.93035732,-0.79961156,-0.68885469,-0.56211423,-0.43364379,-0.25883974,-0.20451434,-0.069180352,0.023919353,0.14040775,0.20467306,0.26396465,0.35379242,0.39350694,0.46660083,0.44653485,0.50498213,0.53175182,0.58663758,0.72599567,0.85983661,1.0375835,1.1873986,1.3347786,1.3561947,1.3807606,1.3729361,1.3740964,1.4025697,1.4220246,1.4416637,1.433764,1.3780829,1.3980811,1.4461353,1.4664853,1.4311897,1.4238918,1.4447495,1.3886715,1.2827849,1.2642553,1.2327018,1.1364166,1.087095,1.0272036,0.96862279,0.86197841,0.79667887,0.71355104,0.66118316,0.63389636,0.59034766,0.59476477,0.65625081,0.68345488,0.72676289,0.77613149,0.7772353,0.79963301,0.6757978,0.51681939,0.28459852,0.098647332,-0.070496647,-0.20588705,-0.33292837,-0.42333907,-0.48996243,-0.52941369,-0.61538659,-0.66021586,-0.72967866,-0.76845296,-0.77166849,-0.80703923,-0.92276041,-0.97789439,-0.94701786,-0.97001542,-1.0200911,-1.0441981,-0.98357327,-0.92033467,-0.83464383,-0.7383474,-0.66785038,-0.63112573,-0.50009791,-0.45056759,-0.35692256,-0.23134796,-0.16032442,-0.11011714,-0.048044406,-0.05977824,-0.084656226,-0.071079578,-0.15092231,-0.18796662,-0.2328335,-0.2488547,-0.18482632,-0.097292664,0.037364372,0.073731737,0.061885077,0.027680197,0.0019936296,-0.014497673,-0.024332282,-0.078187574,-0.10975986,-0.13789098,-0.26587252,-0.40408355,-0.46386217,-0.52817261,-0.4804475,-0.38172533,-0.32954361,-0.27856537,-0.26978379,-0.2368388,-0.24325104,-0.24738797,-0.34351515,-0.49073341,-0.55175311,-0.63155823,-0.75771575,-0.79299247,-0.84261682,-0.9062315,-0.98944018,-1.0304334,-1.0635476,-1.0123061,-0.98991029,-0.9596543,-0.90540411,-0.8790594,-0.84634005,-0.77554216,-0.73597807,-0.70209286,-0.6577149,-0.59866964,-0.46482119,-0.37967567,-0.25526693,-0.093061714,0.079467025,0.23585422,0.4052671,0.55939591,0.75834082,1.0174856,1.054041,1.082441,1.1223793,1.0582475,1.0134351,0.94729881,0.89732658,0.84922162,0.81767566,0.80984182,0.82863288,0.91077536,0.97633252,1.0373033,1.0729242,1.1079621,1.2045932,1.2478599,1.2580104,1.3460912,1.4247963,1.4539617,1.4337866,1.442869,1.4230513,1.4129402,1.4612671,1.4323951,1.4612671,1.4991708,1.4799002,1.489276,1.489276,1.3751287,1.3030672,1.1723947,1.1137763,1.015372,0.9323062,0.8442874,0.7336678,0.63819312,0.5630947,0.53425654,0.47854527,0.45548377,0.38311573,0.34328462,0.25218757,0.19514872,0.12820569,0.057954995,-0.04080478,-0.16592807,-0.21905,-0.36916411,-0.48012782,-0.58973764,-0.72556053,-0.83804739,-0.95307282,-1.0962294,-1.2207697,-1.2949524,-1.3832758,-1.4828818,-1.5558986,-1.6215817,-1.720097,-1.7719215,-1.8578192,-1.9386397,-1.9867597,-2.0596637,-2.1273777,-2.1307813:0
-1.8822486,-1.8805859,-1.865817,-1.8366427,-1.8033249,-1.7506788,-1.7090867,-1.6627405,-1.6273573,-1.5565391,-1.4764594,-1.4053943,-1.3293803,-1.2453258,-1.1585045,-1.0621101,-0.96746928,-0.86774957,-0.7680948,-0.67201213,-0.55913415,-0.44710048,-0.33153368,-0.24782992,-0.137329,-0.040934577,0.07534923,0.16912888,0.21271225,0.29464167,0.40274734,0.47449955,0.54102092,0.57096801,0.64329305,0.74268802,0.80585163,0.86462482,0.87633867,0.9224342,0.9327309,0.96707621,0.99686742,0.99575423,1.010896,1.0414588,1.0568707,1.1041002,1.1197498,1.1035897,1.0874036,1.1031247,1.0869191,1.1027064,1.1027064,1.1185548,1.1185548,1.134463,1.1504243,1.1504243,1.1342045,1.1502152,1.1339836,1.1339836,1.1339836,1.1500399,1.1500399,1.1498983,1.1498983,1.1175676,1.1013374,1.1013374,1.1012114,1.0688197,1.0190079,0.98458593,0.92498272,0.90043923,0.8700557,0.81511568,0.72568878,0.68320042,0.63678925,0.57017176,0.49948598,0.43732385,0.34412483,0.27860364,0.24410506,0.19462969,0.14572196,0.097155854,0.050656359,-0.025258955,-0.068030489,-0.10921991,-0.14886359,-0.18696154,-0.22353972,-0.26031274,-0.32983207,-0.37541192,-0.45610214,-0.53693524,-0.61730073,-0.69512029,-0.7574305,-0.83610736,-0.89609246,-0.997254,-1.0558752,-1.1181205,-1.1705587,-1.2049807,-1.2203731,-1.2153072,-1.2296216,-1.2220228,-1.1899779,-1.1585565,-1.1433069,-1.1115868,-1.105196,-1.0821268,-1.0848936,-1.0574859,-1.1037542,-1.0828152,-1.0788795,-1.1010654,-1.1399167,-1.1568289,-1.14697,-1.1600113,-1.1708964,-1.1798332,-1.1870163,-1.1926537,-1.1771444,-1.142047,-1.1301487,-1.0656562,-1.0010469,-0.89811881,-0.85146085,-0.77366726,-0.71281187,-0.65234616,-0.55695193,-0.49833071,-0.41988766,-0.33509278,-0.26682044,-0.23096966,-0.194976,-0.14003079,-0.10110153,-0.078214187,-0.036336325,-0.025308315,0.019516844,0.1301009,0.1781877,0.22749161,0.27679941,0.3900398,0.41840867,0.48021619,0.5508617,0.65297536,0.71554665,0.76770433,0.82351593,0.87560347,0.92417608,0.96945587,1.0144343,1.0510969,1.1172961,1.1496865,1.1659077,1.1659077,1.1659532,1.2146102,1.2146102,1.2146557,1.2470617,1.1984956,1.2147167,1.2147167,1.2147167,1.1985865,1.230921,1.2147921,1.2309769,1.1826407,1.1826407,1.1666299,1.2149869,1.1989762,1.1347604,1.1347604,1.1189107,1.1350968,1.1031247,1.1035897,1.0879401,1.0568707,1.0099478,0.97956812,0.93473127,0.89529542,0.83099913,0.81904368,0.76992422,0.74209441,0.67878142,0.59481787,0.5379814,0.46090223,0.39444191,0.36998545,0.27629932,0.19317748,0.12074333,0.023935842,-0.089216218,-0.18561064,-0.29611156,-0.37969842,-0.51138507,-0.60729888,-0.72017687,-0.83221054,-0.91562854,-1.0153482,-1.1098332,-1.2222436,-1.2961144,-1.3610225,-1.424177,-1.4931637,-1.5727628,-1.658493,-1.7093595,-1.7398327,-1.7812429,-1.8339799,-1.86696,-1.8959394,-1.8843139:1
-1.9225668,-1.9079556,-1.8800899,-1.8400417,-1.7960921,-1.7835738,-1.7527496,-1.7370404,-1.6776916,-1.6472291,-1.5885004,-1.5285315,-1.4595582,-1.3798882,-1.2875836,-1.1658242,-1.0001928,-0.93388073,-0.75946448,-0.60883167,-0.47283583,-0.31219098,-0.15635191,0.033928585,0.15324759,0.28590135,0.37473595,0.44936249,0.4982471,0.6032715,0.70245144,0.79327811,0.88636816,0.94277924,0.97523893,1.038059,1.0953977,1.1624008,1.194097,1.2391641,1.2957122,1.3287713,1.3991307,1.3796208,1.3846385,1.3700868,1.3554279,1.3554279,1.3260054,1.3406643,1.3111397,1.3257987,1.3405622,1.3405622,1.3255971,1.295384,1.2494023,1.2035846,1.1564853,1.0942065,1.0636511,1.0633178,1.060818,1.0277563,0.97654372,0.87698138,0.85705935,0.81825009,0.77746555,0.75012298,0.67728569,0.65946683,0.59580057,0.53682641,0.42384406,0.38193946,0.31452675,0.26271217,0.22032958,0.1371521,0.068928104,-0.013173234,-0.067793775,-0.13329192,-0.22329695,-0.25952117,-0.29513821,-0.32999304,-0.36396939,-0.42702589,-0.45912902,-0.50487437,-0.53456169,-0.55635565,-0.61461928,-0.6558689,-0.69627879,-0.70091663,-0.68618924,-0.68948352,-0.68966439,-0.68981941,-0.69130507,-0.67697816,-0.69248068,-0.69169263,-0.67276664,-0.63510844,-0.66475701,-0.65974453,-0.65474496,-0.64466833,-0.63807976,-0.64929324,-0.62995385,-0.62725383,-0.59299327,-0.61242309,-0.5991426,-0.5957708,-0.61880496,-0.61080824,-0.59458227,-0.57972569,-0.55338433,-0.55564511,-0.54543929,-0.56340929,-0.59828996,-0.6041034,-0.62628492,-0.60703596,-0.63096152,-0.65527463,-0.67963942,-0.68183561,-0.70654921,-0.70952053,-0.71357702,-0.72268475,-0.73343316,-0.73918201,-0.74586102,-0.73376905,-0.7535606,-0.80479642,-0.80660505,-0.82037646,-0.80424092,-0.81776687,-0.78490153,-0.78231777,-0.74713997,-0.74565432,-0.72476467,-0.68811413,-0.64620566,-0.61863701,-0.55236375,-0.52960088,-0.46060176,-0.42702589,-0.37637141,-0.30108084,-0.26384896,-0.21115331,-0.17256496,-0.10594289,-0.051554886,0.061316367,0.11900253,0.1742225,0.26000698,0.28884812,0.35964683,0.44466394,0.51357651,0.58976364,0.67155622,0.6981159,0.76148245,0.76815499,0.81016036,0.85025891,0.93442725,0.98535303,1.052519,1.1352353,1.2008794,1.2307954,1.2455796,1.2927641,1.324229,1.3709924,1.3709175,1.4016564,1.4476162,1.431624,1.431177,1.4614535,1.4769431,1.4620774,1.4465878,1.4769431,1.4917066,1.4460427,1.4608062,1.4454781,1.4410496,1.3863903,1.3769634,1.3002118,1.2452928,1.2322849,1.1715279,1.1726674,1.1569543,1.0826443,1.0375164,0.94896603,0.873846,0.82002771,0.74035639,0.6631138,0.61158085,0.47413423,0.29395491,0.1189599,-0.06167028,-0.24270094,-0.41883539,-0.57466154,-0.7198297,-0.86940317,-1.0020531,-1.0634172,-1.1437848,-1.2442282,-1.3498521,-1.4179856,-1.4934054,-1.5722744,-1.6441674,-1.6766322,-1.7394562,-1.7813001,-1.8151472,-1.8344866,-1.8804516,-1.9072193,-1.9211974:2
-1.988754,-2.0247361,-1.9262087,-1.8751776,-1.8131615,-1.7475683,-1.6706089,-1.6338861,-1.5844001,-1.5352528,-1.4849838,-1.3888693,-1.335383,-1.2322626,-1.1495885,-1.063549,-1.0079461,-0.95744422,-0.8236544,-0.71124216,-0.63460034,-0.59015189,-0.51556317,-0.46992943,-0.43183076,-0.32985333,-0.27778515,-0.2383742,-0.15457829,-0.13368752,-0.045827764,0.026961857,0.20145375,0.26827247,0.36641252,0.44293793,0.58101385,0.74338825,0.84890675,0.93908206,0.97180246,1.0850338,1.2325751,1.3138206,1.3804403,1.4561614,1.5311375,1.4680863,1.4581637,1.4800281,1.4928102,1.3981012,1.3358945,1.2921361,1.2789412,1.2502868,1.1950247,1.1124987,1.0731047,1.0630107,0.99624276,1.0090291,0.9354521,0.88496925,0.80628915,0.7447725,0.77963278,0.84788655,0.89710156,1.0004611,1.0526923,1.1378322,1.1538527,1.1840882,1.1933335,1.1049446,0.92336213,0.86379063,0.77471382,0.60445511,0.43822216,0.19578129,0.095983943,-0.031477266,-0.16956377,-0.24743321,-0.329684,-0.45905015,-0.53262291,-0.60323244,-0.7023948,-0.73513849,-0.73545598,-0.7644533,-0.79605403,-0.78549223,-0.74874818,-0.73369921,-0.6938861,-0.62113881,-0.55687906,-0.47831114,-0.39578519,-0.30925888,-0.30976687,-0.29133135,-0.28449475,-0.24190891,-0.19691015,-0.15377399,-0.18006207,-0.21178979,-0.28239932,-0.34780204,-0.3850964,-0.47189786,-0.57647871,-0.64753272,-0.71831158,-0.69418242,-0.65110976,-0.62077899,-0.67151372,-0.67559874,-0.65699389,-0.68980108,-0.65191407,-0.72722243,-0.73149795,-0.70341077,-0.71236395,-0.68180036,-0.61627065,-0.57986525,-0.49069321,-0.42302574,-0.35823684,-0.29628417,-0.2848969,-0.34447899,-0.36086141,-0.41163847,-0.39781712,-0.46916746,-0.56164139,-0.6805304,-0.72569849,-0.76470729,-0.87333082,-0.89629586,-0.9103712,-0.88903594,-0.89612653,-0.90711164,-0.8789398,-0.74690675,-0.71270261,-0.6082276,-0.57671153,-0.53514165,-0.43528081,-0.3480137,-0.19951356,-0.036260765,0.10275704,0.24732032,0.35852186,0.59150791,0.77089761,0.93463933,1.0026391,1.1162874,1.2947628,1.4295114,1.4645516,1.5289023,1.4456631,1.3439651,1.2453022,1.2201719,1.1720999,1.0691128,0.97677011,0.93787772,0.98642177,1.0063791,1.0615883,1.1026058,1.1977381,1.2197952,1.2889125,1.2880659,1.3422062,1.4129745,1.4928102,1.5285552,1.5403764,1.5523648,1.6422374,1.6760034,1.5983753,1.5003855,1.4926345,1.4721607,1.4614762,1.4490179,1.2747567,1.3012946,1.148993,0.97994076,0.81025353,0.6371861,0.54915913,0.4403451,0.35872294,0.28911244,0.22338165,0.17279509,0.050477201,-0.045510275,-0.1143842,-0.10081684,-0.10651048,-0.16657937,-0.25084093,-0.31463503,-0.29615718,-0.3402458,-0.41083417,-0.52849555,-0.59662867,-0.64886617,-0.75848451,-0.88556473,-1.005893,-1.0464258,-1.1078493,-1.2160707,-1.3379441,-1.4023732,-1.4523459,-1.5246699,-1.61054,-1.73453,-1.7877835,-1.8221146,-1.8247392,-1.8652296,-1.9168533,-1.9185889,-1.9864892:0
-1.7545353,-1.7778696,-1.7514154,-1.7256979,-1.6751078,-1.6160246,-1.5842406,-1.5509617,-1.4796156,-1.4414617,-1.3838302,-1.3403466,-1.2954113,-1.2220936,-1.1695969,-1.1172302,-1.0303713,-0.99477407,-0.93694754,-0.82959257,-0.75941643,-0.69682339,-0.56006767,-0.49595801,-0.36162889,-0.29723757,-0.22147161,-0.073839562,-0.01417143,0.06911263,0.20872826,0.29612886,0.35274208,0.48945447,0.58027829,0.65977081,0.78627851,0.79028672,0.87751399,1.0327075,1.0517649,1.1951612,1.2751,1.3269251,1.4299924,1.4028427,1.4464867,1.4790983,1.4631153,1.496117,1.5274265,1.4990332,1.5213383,1.474698,1.4889065,1.5013255,1.4978849,1.4898013,1.4015059,1.4351185,1.3750582,1.317704,1.2907342,1.1882888,1.1305532,1.1012153,1.0716369,0.98757721,0.95746149,0.9273241,0.84243675,0.84063848,0.78632184,0.73311018,0.7344318,0.73319684,0.70700266,0.7110542,0.63593822,0.61628717,0.59332122,0.55343414,0.53633967,0.51621197,0.45153899,0.40695039,0.38957426,0.26902471,0.19627032,0.095805128,0.023549056,-0.0084516086,-0.11576325,-0.18368612,-0.25204232,-0.36251719,-0.37731506,-0.44593125,-0.58221031,-0.61735255,-0.68310882,-0.81230311,-0.85743336,-0.95529863,-0.97343307,-0.9881876,-1.0177183,-1.0040688,-1.0183683,-0.99644235,-0.97930455,-0.9915025,-0.94830052,-0.93963412,-0.91177166,-0.88993235,-0.89742878,-0.84985027,-0.8189979,-0.82313611,-0.7860656,-0.7880372,-0.71168626,-0.68512376,-0.68404046,-0.68237218,-0.67728067,-0.67387911,-0.6699359,-0.66046786,-0.70113492,-0.72594248,-0.75672985,-0.79195875,-0.86939299,-0.85923164,-0.8883074,-0.86555811,-0.89173062,-0.87935935,-0.890344,-0.91250831,-0.8988154,-0.89851208,-0.88440752,-0.87032463,-0.80385338,-0.75809481,-0.69504678,-0.58569854,-0.55395787,-0.44690622,-0.37896168,-0.31060548,-0.2003256,-0.13155775,-0.090024055,0.019194193,0.054293094,0.093010215,0.2222045,0.29439558,0.29372393,0.43769442,0.45329394,0.51359038,0.55817899,0.57666007,0.59581281,0.61563719,0.66267405,0.70227948,0.67894521,0.69829293,0.7419499,0.76621581,0.74298987,0.79039505,0.84161345,0.84018349,0.94446189,0.94513354,0.94812345,1.0002085,1.0273993,1.1059862,1.1327177,1.1592585,1.2115797,1.255345,1.3250076,1.3672823,1.3452198,1.4564097,1.4705229,1.4724317,1.4613972,1.4398287,1.4209056,1.3816815,1.384379,1.3545947,1.3631701,1.3254236,1.2853827,1.2676751,1.2421721,1.164532,1.0537408,1.0194912,0.9357955,0.82954549,0.75939102,0.62408692,0.53480139,0.49777421,0.36416006,0.30039706,0.25167025,0.077497367,-0.0087982644,-0.038134013,-0.20446381,-0.26495525,-0.34832597,-0.48506002,-0.54910468,-0.6285972,-0.7286724,-0.78662891,-0.91666818,-0.94975214,-0.9958357,-1.1130054,-1.1668453,-1.1939062,-1.2983362,-1.3253537,-1.3711989,-1.4614161,-1.4782506,-1.5169461,-1.5660195,-1.5764625,-1.6410272,-1.6473103,-1.6753894,-1.7276045,-1.751762,-1.7773496,-1.7558569:1
-2.1597074,-2.1756027,-2.1655955,-2.1009848,-2.0227232,-2.0028674,-1.9155491,-1.8727482,-1.8772105,-1.8199929,-1.7906844,-1.7509991,-1.694204,-1.5696296,-1.4396425,-1.3791772,-1.2744587,-1.1676807,-1.108166,-1.0109727,-0.97374296,-0.91713266,-0.84660744,-0.80362164,-0.75171127,-0.68688932,-0.62338757,-0.57770855,-0.59164989,-0.52387069,-0.47003282,-0.45722686,-0.40154071,-0.39243131,-0.40764004,-0.47135303,-0.53406265,-0.45157639,-0.43723899,-0.30788553,-0.23339969,-0.039884386,0.072596883,0.13924071,0.26769644,0.34661815,0.37310142,0.47887606,0.56034576,0.6768114,0.6403342,0.69366775,0.64482025,0.67187913,0.60441413,0.68790111,0.64196598,0.60990089,0.4921837,0.44703277,0.32657748,0.16709699,0.15970386,0.039301371,0.013742247,-0.0432377,-0.025573388,-0.084375216,-0.089735239,-0.12440376,-0.08049382,0.01590738,0.13533291,0.29140728,0.50246544,0.63840671,0.86076053,1.0218833,1.1207243,1.2207481,1.3584004,1.6403191,1.8161595,1.9814727,1.9326384,1.9186574,1.7544849,1.6790961,1.5091437,1.2442504,1.1146276,1.0179016,0.88655729,0.65820447,0.62058397,0.39483195,0.22177979,0.087594386,-0.031778341,-0.15714479,-0.32272461,-0.32029544,-0.49419253,-0.65401627,-0.72462071,-0.76512453,-0.76317063,-0.751236,-0.72797402,-0.73586884,-0.69547063,-0.70941197,-0.68781346,-0.58034896,-0.42741668,-0.21370227,-0.21172197,0.021610655,0.06919076,0.061771221,-0.026418318,-0.069087269,-0.24559837,-0.28454435,-0.28243202,-0.25388924,-0.20551701,-0.25336116,-0.29785199,-0.33325983,-0.42665096,-0.35662741,-0.29241275,-0.3031592,-0.16688788,-0.12944694,-0.080018547,0.081019776,0.15054165,0.18792979,0.36652681,0.47832157,0.56902742,0.7416888,0.91263393,0.93482126,1.1029728,1.2767617,1.2939982,1.4799593,1.6700184,1.7660024,1.9793155,2.0320285,2.2476308,2.3109345,2.4316037,2.4310228,2.4236587,2.5540023,2.2451145,2.102926,1.8201043,1.472487,1.2424443,0.98806767,0.76182718,0.65318506,0.55697661,0.6064578,0.65594428,0.6571087,0.48249341,0.30827947,0.27643618,0.18056306,0.057361744,0.031855428,-0.057126233,-0.083503882,-0.057469485,-0.093563827,-0.031778341,0.016145016,0.0080125678,0.0028901814,0.14090417,0.14262043,0.073864278,0.10676373,0.10676373,0.052741035,0.074233934,0.047777073,0.047777073,0.086591032,0.060741463,0.035155935,0.0098872556,0.0098872556,-0.039805173,-0.080282588,-0.10452151,-0.077642182,-0.22682509,-0.10726753,-0.11373652,-0.06362163,0.15112254,0.31139514,0.41608722,0.56397368,0.61139272,0.69208087,0.87785187,0.86210449,0.74339187,0.56881883,0.47095484,0.33383859,0.21420182,0.1652223,0.093957762,0.023907808,0.0018340193,-0.074790544,-0.19033468,-0.27377149,-0.29647898,-0.37297152,-0.50707771,-0.56738457,-0.66964747,-0.82389995,-0.88499893,-0.94271819,-1.0945415,-1.1368936,-1.2432491,-1.291595,-1.3750318,-1.4651752,-1.5955584,-1.6958674,-1.7689274,-1.8849733,-1.9687797,-2.0088347,-2.0831621,-2.1211047,-2.0965489:2
-2.1447538,-2.1653963,-2.1561603,-2.0793166,-2.0127019,-1.9173169,-1.8389493,-1.8199001,-1.7316499,-1.6151376,-1.5184596,-1.4887889,-1.4119222,-1.2924081,-1.2069981,-1.1655284,-1.0518561,-0.87997386,-0.74365028,-0.666645,-0.50402186,-0.37515636,-0.2394562,-0.1010776,-0.045753868,0.021484324,0.10121423,0.16212575,0.18214481,0.28191687,0.34645352,0.40364986,0.4343573,0.44956902,0.61399087,0.75023133,0.85287579,0.90008799,0.99097038,1.1572071,1.2490801,1.2913002,1.3335873,1.3350882,1.3868075,1.4592202,1.5306031,1.5261536,1.4988265,1.4988265,1.4905303,1.4593426,1.4201865,1.4124813,1.2811221,1.2558316,1.2216168,1.1988408,1.2239558,1.101126,1.0344628,0.98698966,0.85420809,0.70118117,0.58700324,0.51228618,0.36871694,0.28263266,0.19556012,0.13444079,0.074891583,0.063969995,0.10802579,0.18343785,0.20756694,0.2588961,0.34718779,0.37459566,0.40140089,0.27662925,0.042149908,-0.12232044,-0.19408427,-0.28923832,-0.40930652,-0.54916288,-0.56100807,-0.64387822,-0.66138047,-0.70642914,-0.74323466,-0.81442125,-0.84806343,-0.8467473,-0.88002004,-0.91109924,-0.90825916,-0.87745705,-0.84409194,-0.75027712,-0.64791898,-0.53884164,-0.42348381,-0.4160719,-0.32424282,-0.26289259,-0.22698758,-0.20779976,-0.087500657,-0.01104954,0.11827776,0.17304734,0.21871943,0.26450698,0.30415257,0.40249536,0.45628822,0.42987091,0.36595768,0.28556509,0.29424695,0.16034781,-0.027859088,-0.083713891,-0.095789981,-0.084498952,-0.039611918,-0.0038223581,-0.0075398543,-0.023495071,-0.04078951,0.02517873,0.036492849,0.11767742,0.16586633,0.18362257,0.15813117,0.10610931,0.010793636,-0.042844523,-0.093134627,-0.11795642,-0.24753771,-0.37039981,-0.47199598,-0.55149498,-0.67084739,-0.7790704,-0.88320647,-0.88810156,-0.95868781,-0.96688477,-1.0073847,-1.0099939,-1.0446751,-1.0153969,-0.97953811,-0.98136222,-0.91135323,-0.90851315,-0.89754538,-0.91624831,-0.87588693,-0.75120072,-0.60728051,-0.45562514,-0.35867007,-0.1833705,0.0067528795,0.20290276,0.32704404,0.45518913,0.536219,0.64917085,0.65991003,0.57590847,0.58382143,0.56067136,0.50879266,0.43753911,0.44161219,0.45078817,0.48545556,0.55371894,0.70881473,0.82389317,0.88375179,0.93787022,1.1060119,1.1872357,1.2962669,1.3139077,1.4308241,1.4483148,1.4703427,1.5061114,1.549777,1.6157314,1.7146283,1.7803795,1.7565275,1.765692,1.7397965,1.7167249,1.7590166,1.7429875,1.7254553,1.6917023,1.6767122,1.5028511,1.3191445,1.1763141,1.0793383,0.96242648,0.81486266,0.60960146,0.53678009,0.40753822,0.33430355,0.27249613,0.2827712,0.2820785,0.17835804,0.10987299,0.045659594,-0.033215977,-0.11130649,-0.21807482,-0.27429907,-0.43895413,-0.57026718,-0.70160332,-0.82876016,-0.91731046,-1.0339844,-1.134403,-1.2568726,-1.3379879,-1.434712,-1.5016962,-1.5864136,-1.6379967,-1.7355752,-1.7800005,-1.8874615,-1.9277998,-1.980168,-2.047614,-2.0384242,-2.0468059,-2.0994742:0
-1.6320369,-1.6301156,-1.6074832,-1.603764,-1.576161,-1.5718248,-1.5191041,-1.490796,-1.4611835,-1.3981512,-1.3630922,-1.2919694,-1.2519926,-1.169818,-1.1284839,-1.0989948,-1.004182,-0.97335334,-0.8702385,-0.81293485,-0.73647123,-0.67407353,-0.61010707,-0.49260903,-0.42605148,-0.31227262,-0.24356465,-0.14926304,-0.078193116,-0.033527644,0.10209041,0.17591006,0.28595211,0.36084697,0.42423176,0.52376843,0.58179476,0.70817654,0.71692632,0.83440321,0.8816774,0.94570026,1.009108,1.0685003,1.1631756,1.1981466,1.2813082,1.3317376,1.3806986,1.4098052,1.3903932,1.4164028,1.3901975,1.3977064,1.4000895,1.3970101,1.4307507,1.3882463,1.3661515,1.3525932,1.32156,1.3059853,1.2790062,1.2440547,1.2258554,1.188103,1.1475709,1.1072398,1.0479655,1.0262709,0.96084316,0.93711265,0.87183831,0.87107508,0.80669617,0.7859974,0.80765681,0.76737504,0.72569902,0.68801186,0.67047353,0.63574938,0.59654812,0.60294652,0.56302257,0.54691198,0.44767496,0.38605282,0.31611099,0.25240894,0.19808416,0.10817154,0.050744504,-0.066559647,-0.078457513,-0.13962136,-0.26291851,-0.32476979,-0.42338988,-0.4835314,-0.60219279,-0.66046589,-0.70336872,-0.80778792,-0.8621127,-0.93434597,-0.95378796,-0.98239572,-0.97409365,-0.98805382,-0.99961678,-0.98361195,-0.97853552,-0.99029238,-0.98190218,-0.96071516,-0.97062124,-0.95613228,-0.93059153,-0.92216608,-0.92787705,-0.96166699,-0.96573871,-0.96903486,-0.93834717,-0.939299,-0.91196035,-0.94516862,-0.93958103,-0.96921112,-0.96454011,-0.98542747,-1.0301282,-1.0692766,-1.0599522,-1.0686949,-1.085916,-1.0745822,-1.0779841,-1.0919795,-1.0805928,-1.0668794,-1.0134007,-0.97374112,-0.95632617,-0.8621127,-0.80778792,-0.69587747,-0.63845043,-0.52114628,-0.46518224,-0.40401839,-0.28070362,-0.21886996,-0.14226533,-0.082141445,0.014486858,0.072777591,0.13769588,0.19808416,0.25240894,0.36863787,0.43196977,0.47011345,0.52598936,0.56566654,0.58650103,0.58059616,0.6386225,0.68055587,0.67694244,0.73917269,0.76111412,0.80443469,0.82615226,0.85040276,0.89499596,0.91799674,1.0313385,1.0756514,1.1029548,1.1468412,1.1638895,1.1998052,1.2406581,1.2911085,1.3087456,1.35235,1.3767644,1.4577739,1.4635818,1.4812347,1.4920803,1.4930233,1.4953799,1.4562756,1.4874692,1.4715014,1.4646059,1.4342848,1.431796,1.3603911,1.3115271,1.2095544,1.1564987,1.1214379,1.0081632,0.96818811,0.86477891,0.80210271,0.75086961,0.70043852,0.67013862,0.54543136,0.48812771,0.41231626,0.34990094,0.22057553,0.14666775,0.080110202,-0.033527644,-0.10221799,-0.1964491,-0.24564457,-0.31227262,-0.44789068,-0.49987113,-0.63189339,-0.68500194,-0.8015834,-0.84820541,-0.90623175,-0.98935818,-1.0206628,-1.1381432,-1.1854174,-1.2696014,-1.292128,-1.3302893,-1.3827986,-1.4177695,-1.4812424,-1.5109959,-1.5461078,-1.5718248,-1.576161,-1.6238229,-1.6250392,-1.6301508,-1.6316138,-1.6323365:1
-2.2551199,-2.2336627,-2.2291947,-2.2214948,-2.1698563,-2.0940587,-2.0531576,-1.986296,-1.9101275,-1.8264004,-1.7359094,-1.6154844,-1.5065915,-1.3875616,-1.2581828,-1.084212,-1.01207,-0.86162261,-0.69109553,-0.5224581,-0.358377,-0.19500232,-0.043124433,0.10790753,0.27142879,0.42630538,0.57182029,0.68845721,0.85369858,0.95931552,1.0681996,1.1313985,1.2253597,1.3138038,1.357202,1.3758088,1.3889657,1.4231806,1.4565249,1.4869658,1.4817136,1.4613938,1.4763802,1.490376,1.4909022,1.4197157,1.4101721,1.3229695,1.2928482,1.2448495,1.1881531,1.0694658,1.0308006,1.0308006,1.0308006,1.0694658,1.0494268,1.0648495,1.1047333,1.1249966,1.1650853,1.1650853,1.2448495,1.1848277,1.1047333,0.96586923,0.79096065,0.60289168,0.48202867,0.30899561,0.15279804,0.042836684,-0.082312459,-0.1581631,-0.21351023,-0.26691473,-0.30071639,-0.31293726,-0.30645596,-0.29266333,-0.26375355,-0.21049033,-0.15328888,-0.094833554,-0.054850818,-0.043512958,0.027675386,0.10338121,0.24221349,0.37744309,0.49560232,0.63635956,0.63053699,0.55862104,0.45142528,0.34821189,0.19538742,0.050843827,-0.058930329,-0.1890155,-0.31194829,-0.45056335,-0.46797632,-0.55039657,-0.58430419,-0.5512266,-0.48062104,-0.41584336,-0.39403299,-0.3082573,-0.24831852,-0.19042832,-0.1533242,-0.12114728,-0.12550936,-0.13430414,-0.13910772,-0.16695789,-0.20731149,-0.28102524,-0.37527783,-0.47466955,-0.56032161,-0.62783663,-0.65468016,-0.60577901,-0.55474098,-0.50149542,-0.50020622,-0.57794651,-0.65256093,-0.79696855,-0.79993546,-0.80332623,-0.7383013,-0.67502473,-0.59765531,-0.54681154,-0.54780051,-0.53180036,-0.56759762,-0.5514032,-0.57762862,-0.62162023,-0.64297144,-0.68805797,-0.74178036,-0.73884877,-0.73697678,-0.64874633,-0.63816786,-0.59712551,-0.614044,-0.60063989,-0.51557061,-0.46380851,-0.34242983,-0.23164727,-0.1277522,0.027693046,0.11847187,0.21441631,0.28578479,0.3721256,0.30556423,0.22117664,0.061726054,-0.089023342,-0.15871057,-0.17306833,-0.18551878,-0.17444582,-0.18583666,-0.22368251,-0.19466677,-0.19132899,-0.20962498,-0.22839779,-0.18894486,-0.11062179,-0.052201785,0.10906957,0.19497417,0.34133324,0.43061801,0.59433707,0.73345721,0.84539828,0.93071303,0.9393683,1.0177391,0.99755696,1.0765176,1.1357641,1.1453412,1.1253022,1.1751675,1.1453412,1.1453412,1.0658702,1.0068409,1.0563355,1.0563355,1.0859093,1.0859093,1.1766616,1.2168192,1.3197376,1.3573751,1.3436231,1.3364089,1.3173835,1.288396,1.3080271,1.2998734,1.2689345,1.2517635,1.2068005,1.1758634,1.1174981,1.0507955,0.91456099,0.76995029,0.67549284,0.54988983,0.35082561,0.15337553,0.0029157585,-0.14770825,-0.33653131,-0.48042678,-0.64380147,-0.79567935,-0.96689517,-1.1309939,-1.2257763,-1.2699622,-1.4113676,-1.523298,-1.6260629,-1.7000945,-1.766232,-1.8845908,-1.9763356,-2.0415725,-2.1208845,-2.1367611,-2.2045233,-2.2320026,-2.2570801,-2.2396672:2
-1.8289016,-1.8414675,-1.806303,-1.8032227,-1.7809696,-1.7556218,-1.7272368,-1.6952102,-1.6687684,-1.6126463,-1.5336377,-1.4651511,-1.4064236,-1.3661493,-1.295921,-1.2184957,-1.1503546,-1.0955135,-0.95094029,-0.83878234,-0.69800914,-0.56061853,-0.50668426,-0.38732931,-0.25157962,-0.11146854,1.2804341E-4,0.074199503,0.19386536,0.27104016,0.38894419,0.4977138,0.54054023,0.63830131,0.72890283,0.74029711,0.80125997,0.80969628,0.860461,0.88470623,0.88200448,0.86337722,0.86697572,0.83599266,0.86452874,0.95284881,0.99656623,1.0399742,1.1242956,1.2033834,1.2849656,1.3243663,1.386675,1.4440451,1.4040946,1.3816169,1.33664,1.33664,1.33664,1.3316554,1.3492189,1.3893249,1.3668472,1.3267629,1.2399484,1.1919142,1.1657733,1.1525164,1.1131446,1.0285713,0.99718661,0.94983039,0.87169982,0.78737696,0.68577125,0.64671028,0.5831306,0.50324685,0.42207627,0.37928583,0.39469171,0.40849842,0.42266211,0.45905875,0.51688947,0.53711734,0.59934831,0.61964527,0.66058465,0.53074512,0.44824598,0.3115103,0.19073754,0.077481332,-0.029322055,-0.06940931,-0.16913086,-0.25500539,-0.32926397,-0.35512996,-0.41988851,-0.45639167,-0.5441806,-0.63001194,-0.65049459,-0.73609563,-0.84327326,-0.88159006,-0.94590239,-0.92517505,-0.9513865,-0.98588889,-0.98954496,-0.94657891,-0.91341516,-0.89792723,-0.88644083,-0.8585165,-0.91210531,-0.91758942,-0.97595704,-0.94329708,-0.88478552,-0.80315722,-0.78353821,-0.74247217,-0.76301239,-0.78300564,-0.82613002,-0.91138561,-0.99484195,-1.076024,-1.1323765,-1.1477061,-1.1121817,-1.0613566,-1.0176852,-1.0051193,-1.0377792,-1.0562035,-1.0742248,-1.0518565,-1.0450482,-1.0207079,-0.99397831,-0.91391895,-0.87090972,-0.78530867,-0.76472527,-0.67889393,-0.6159922,-0.5542132,-0.47189399,-0.42607793,-0.35294208,-0.29800023,-0.19827868,-0.17854452,-0.093562422,-0.0056871276,0.086247271,0.18449487,0.23712505,0.38563789,0.52291191,0.60002626,0.58273477,0.58538038,0.54648783,0.49115302,0.47686267,0.46287459,0.46502937,0.53318634,0.59986793,0.66455595,0.72681138,0.76570538,0.82364981,0.89594218,0.94738629,1.0129034,1.0269563,1.1723758,1.2458096,1.2808043,1.3058887,1.318862,1.3468554,1.3520747,1.3917891,1.4142121,1.4142121,1.4193335,1.4416585,1.424488,1.4639203,1.4467497,1.4126863,1.3958036,1.3567628,1.3160437,1.2748078,1.1925533,1.1064773,1.0213714,0.97835639,0.92771403,0.83145135,0.78076005,0.7746023,0.75230601,0.72645585,0.70093531,0.70336934,0.6771147,0.6521253,0.58799145,0.53411619,0.4895121,0.4813392,0.40817744,0.29456426,0.21906779,0.092120018,0.059992638,-0.066688847,-0.19397488,-0.36969668,-0.50668426,-0.55730791,-0.67405755,-0.78630186,-0.89881966,-1.0184913,-1.0921597,-1.1818486,-1.2776262,-1.3651561,-1.4240707,-1.501352,-1.5885364,-1.6326108,-1.6892655,-1.7162398,-1.7640279,-1.8065045,-1.8454834,-1.8357819,-1.8387902,-1.8251159:0
-2.0042949,-1.9856122,-1.9532813,-1.9336383,-1.8935375,-1.8322659,-1.8001241,-1.7444835,-1.6840995,-1.6179535,-1.5625311,-1.4667169,-1.3822811,-1.2890423,-1.1931845,-1.1042381,-1.0002902,-0.90169694,-0.735328,-0.61434167,-0.51113589,-0.39180831,-0.26837751,-0.17249057,-0.053177535,0.019153812,0.096032149,0.19863845,0.31397196,0.38781218,0.49087828,0.51892848,0.5932736,0.64426974,0.69018198,0.74942817,0.82067988,0.88738024,0.94262508,0.95455202,0.96541533,0.98534788,1.0177545,1.0506543,1.0324838,1.049112,1.0658551,1.0827102,1.0996716,1.1167392,1.0985585,1.1157265,1.114804,1.1139732,1.1496056,1.1671358,1.1665582,1.1665582,1.1842427,1.1842427,1.2019971,1.1838149,1.1838149,1.2016348,1.2195143,1.2195143,1.2374491,1.2013452,1.1831922,1.201127,1.1828779,1.1430884,1.1194732,1.072768,1.0406829,0.98183979,0.91677199,0.86728036,0.80634195,0.74287905,0.68950829,0.62690824,0.50918992,0.4005132,0.30459279,0.21075164,0.091428412,0.024992876,-0.012015992,-0.072325822,-0.10066994,-0.11089885,-0.092710891,-0.13743873,-0.16229076,-0.17412021,-0.19056213,-0.21186387,-0.2542491,-0.29459728,-0.33682246,-0.41690769,-0.51628673,-0.60908899,-0.70066902,-0.78999374,-0.87947852,-0.95029517,-1.0418752,-1.1033069,-1.1442371,-1.1625996,-1.1815151,-1.1747055,-1.1285809,-1.0874324,-1.0519877,-0.99979554,-0.95246318,-0.87319276,-0.83540545,-0.75062044,-0.65629039,-0.60238127,-0.57905702,-0.5232709,-0.57060326,-0.66713042,-0.71303683,-0.77439575,-0.85200742,-0.9119695,-0.97805728,-1.0199041,-1.060005,-1.095246,-1.1066098,-1.1164459,-1.1248996,-1.1320875,-1.089615,-1.0491067,-0.96941436,-0.88026424,-0.80693037,-0.71743105,-0.62810632,-0.5546415,-0.46182469,-0.36246021,-0.3227377,-0.26244096,-0.22239834,-0.18030412,-0.20643659,-0.18504754,-0.17381466,-0.15018485,-0.16837282,-0.15593225,-0.12971248,-0.10155752,-0.02787444,0.024352659,0.069387511,0.1850324,0.29823719,0.40776656,0.53000859,0.59962338,0.68361394,0.75311669,0.81524532,0.89241175,0.94157746,0.94393607,1.0040509,1.0550049,1.0845392,1.1265941,1.1648936,1.2009073,1.1648107,1.1828779,1.1828779,1.1648936,1.1648936,1.1829957,1.1829957,1.165061,1.201127,1.201127,1.1831922,1.2013452,1.2195143,1.1838149,1.1660606,1.1660606,1.1665582,1.1489493,1.131419,1.1139732,1.079352,1.0975385,1.1157265,1.0814909,1.0476744,1.0309313,1.0159735,1.0177545,0.97945644,0.93445651,0.88824016,0.83299532,0.81918993,0.74802115,0.68899903,0.66061271,0.59168615,0.5171708,0.43679601,0.36846456,0.31047114,0.21120124,0.091876564,0.013972425,-0.10697025,-0.19868124,-0.32201018,-0.44042109,-0.56476856,-0.66779973,-0.78877151,-0.9080991,-1.0619838,-1.1570559,-1.2513569,-1.3452068,-1.4199229,-1.5030055,-1.5805881,-1.6523942,-1.7012689,-1.7784441,-1.8160131,-1.8653534,-1.8932901,-1.9334783,-1.9695486,-2.0177686,-2.0040039:1
-1.8292712,-1.8324255,-1.8226135,-1.8098929,-1.7941343,-1.8070359,-1.7868432,-1.7479961,-1.7091102,-1.6499023,-1.6202079,-1.5864154,-1.5093805,-1.4249769,-1.3862979,-1.3108272,-1.2386143,-1.1407532,-1.0324596,-0.92809599,-0.79832986,-0.66852495,-0.52773168,-0.47082487,-0.3127734,-0.19417662,-0.062329169,0.074469512,0.17738395,0.31470878,0.42918299,0.49877683,0.5544762,0.64654707,0.69692032,0.75583217,0.80856728,0.87303278,0.94754036,1.0014092,1.0189945,1.0031105,1.0089614,1.0591977,1.1114131,1.1529155,1.204151,1.2550052,1.2898512,1.3089516,1.3089516,1.32429,1.32429,1.32429,1.3086452,1.3240664,1.3083543,1.277159,1.2925815,1.2925815,1.3080803,1.3080803,1.307823,1.2600249,1.2279531,1.2275149,1.1634902,1.1468228,1.130251,1.0971269,1.02933,1.0094488,0.94040956,0.88622787,0.81179139,0.76823739,0.73852615,0.71523469,0.64282007,0.5924869,0.53179751,0.43439793,0.39381596,0.35221789,0.34221331,0.2692079,0.19281937,0.13200459,0.041452707,-0.030424128,-0.088093653,-0.1449746,-0.1940732,-0.24770935,-0.30859782,-0.33387106,-0.36631906,-0.39868949,-0.42949569,-0.4744575,-0.50207061,-0.56041237,-0.61684085,-0.67121387,-0.70569148,-0.72297553,-0.75632845,-0.80569853,-0.84163695,-0.84534714,-0.86515205,-0.89831105,-0.88291442,-0.90323643,-0.88592652,-0.90898916,-0.91546583,-0.90977774,-0.92236911,-0.93608518,-0.91010092,-0.91388868,-0.92729448,-0.86261826,-0.87804075,-0.89445866,-0.91169101,-0.90244785,-0.8758043,-0.87579137,-0.87541647,-0.88720634,-0.8727017,-0.87080136,-0.90059922,-0.8974837,-0.91219518,-0.89955209,-0.91628026,-0.91363013,-0.90804545,-0.91934408,-0.92977656,-0.9052919,-0.91520728,-0.89223514,-0.85495226,-0.82225864,-0.82175447,-0.77213877,-0.7219284,-0.66824055,-0.6313972,-0.61292382,-0.5909988,-0.55292735,-0.53082134,-0.49287917,-0.44762003,-0.40172745,-0.33115629,-0.24856257,-0.19693018,-0.1339216,-0.067577729,-0.043118921,-0.029997521,0.05713375,0.14635927,0.23725891,0.31616442,0.34805912,0.40838007,0.47835139,0.5352582,0.56315442,0.63642355,0.69641356,0.73088083,0.81329486,0.86379221,0.89164061,0.91768174,0.99036525,1.0094488,1.0787078,1.0971269,1.1468228,1.179135,1.2114072,1.2596513,1.2756697,1.2916481,1.2916481,1.3234678,1.3236553,1.3864312,1.3863614,1.4329275,1.3862864,1.4017076,1.3862075,1.3707863,1.3707863,1.3552863,1.32429,1.3398651,1.3089516,1.3054262,1.2550052,1.1943817,1.1578615,1.1092619,1.042136,1.027515,0.97147561,0.91977212,0.86326736,0.81889763,0.76943836,0.77676436,0.68402256,0.59961511,0.50754425,0.44074275,0.36593137,0.24677225,0.11872677,0.012094381,-0.042239852,-0.18762239,-0.32841566,-0.45615217,-0.61430706,-0.7443576,-0.87268877,-1.0062297,-1.1029144,-1.1552061,-1.269679,-1.3392806,-1.4173626,-1.4716839,-1.5521317,-1.5923491,-1.6596755,-1.7040555,-1.7259676,-1.7645045,-1.7976635,-1.8124396:2
-2.1309831,-2.1095306,-2.0841777,-2.0555431,-2.0297776,-1.976859,-1.9365419,-1.8649648,-1.7891498,-1.6846065,-1.6410077,-1.5476407,-1.466275,-1.3783648,-1.2593823,-1.1367619,-1.0773926,-0.94042673,-0.78455871,-0.63195357,-0.49628164,-0.35850946,-0.30358436,-0.14689125,-0.016638694,0.14106704,0.26218541,0.37528911,0.44085981,0.50021418,0.5902227,0.71329881,0.764751,0.80527444,0.86432126,0.88176078,0.88548308,0.87813974,0.90884829,0.8858225,0.95547742,1.0242341,1.1217548,1.1420952,1.2541301,1.3108629,1.3872705,1.4346553,1.4346553,1.4068534,1.4266181,1.4666803,1.4869757,1.4312012,1.4032529,1.3957446,1.4371775,1.381206,1.3741946,1.3607343,1.3307646,1.2682655,1.1220042,1.0724422,0.96780885,0.92245861,0.88113446,0.80481313,0.69935844,0.60375989,0.54904857,0.47006444,0.38916759,0.35937977,0.25428325,0.17116989,0.13583518,0.14646766,0.18728738,0.20857484,0.24933643,0.32185856,0.34154271,0.38782306,0.18076725,0.12780925,-0.035615887,-0.12335728,-0.20513548,-0.36381632,-0.48739311,-0.50457009,-0.54544982,-0.61138244,-0.67457725,-0.73505299,-0.74015358,-0.73705947,-0.76434387,-0.78722152,-0.86185514,-0.85362294,-0.8445844,-0.83355812,-0.82613226,-0.78292727,-0.73494047,-0.71348799,-0.66298841,-0.60558802,-0.59857471,-0.53489235,-0.4657156,-0.436706,-0.42603602,-0.39327598,-0.3670792,-0.37257359,-0.36044093,-0.32659327,-0.42183553,-0.50682035,-0.59606192,-0.59606192,-0.56587093,-0.56587093,-0.53489235,-0.42382326,-0.29512713,-0.22467524,-0.1862708,-0.21318016,-0.24440252,-0.28320076,-0.38099331,-0.39888288,-0.46779709,-0.50336996,-0.53785519,-0.53751765,-0.60714445,-0.63431634,-0.68144054,-0.6754586,-0.69979891,-0.72119513,-0.73927222,-0.75185493,-0.72700831,-0.7074498,-0.6542499,-0.63197232,-0.62929076,-0.56465204,-0.55943894,-0.52180334,-0.48486157,-0.37718662,-0.2238689,-0.12099451,-0.010094187,0.046387342,0.17101237,0.3348013,0.49669064,0.61205398,0.55942227,0.50409212,0.42377471,0.34779468,0.27603764,0.23211444,0.19058213,0.19799299,0.21051944,0.29800205,0.38520338,0.52531958,0.63092428,0.7383442,0.84026598,0.93852359,0.95423416,1.0330045,1.0951829,1.2074222,1.2457779,1.2924633,1.3413558,1.3863854,1.477774,1.4344753,1.4344753,1.4427919,1.4512772,1.4810407,1.4896667,1.4181553,1.4181553,1.4479018,1.4272688,1.3472927,1.2684173,1.2405122,1.2608058,1.2134885,1.1133744,1.000822,0.94151269,0.89725194,0.98373507,0.96598426,0.99178162,1.0552858,1.0617422,0.94310662,0.88715953,0.84693988,0.75964104,0.68510492,0.58227554,0.46786106,0.3442824,0.26346806,0.11528281,-0.025302195,-0.12725773,-0.22968207,-0.38969432,-0.54428719,-0.60157506,-0.74915462,-0.88306385,-1.0171043,-1.12041,-1.2279537,-1.2679708,-1.3632881,-1.4690503,-1.5696557,-1.6613351,-1.7257112,-1.7655409,-1.8609894,-1.9085074,-1.9506998,-2.0277337,-2.080446,-2.10413,-2.1682249,-2.1511979:0
-1.8976316,-1.8960795,-1.8432461,-1.8200732,-1.7765835,-1.7457122,-1.7278942,-1.6998788,-1.6228792,-1.5578774,-1.4859532,-1.4435499,-1.3766545,-1.2924842,-1.2010967,-1.0986272,-1.0086677,-0.9133999,-0.7950059,-0.69199318,-0.58651263,-0.52503404,-0.42326301,-0.32276469,-0.19907803,-0.094575298,-0.014797482,0.10028435,0.16466535,0.2351756,0.33355685,0.39190486,0.47945713,0.54256387,0.61734548,0.64561849,0.69603993,0.76102936,0.80215374,0.83904245,0.89903102,0.91283227,0.94191858,0.94635603,0.97950883,1.0198711,1.0174173,1.0517109,1.0690618,1.0671635,1.1025126,1.0831486,1.0816679,1.0996474,1.155287,1.1736002,1.1349499,1.153367,1.171882,1.1904917,1.1899158,1.1899158,1.2087009,1.2087009,1.2083315,1.2272702,1.2462787,1.2270948,1.2270358,1.2079636,1.1891475,1.1634821,1.1360379,1.0823927,1.0444983,1.0167902,0.96482443,0.9449343,0.87129969,0.80051318,0.70219866,0.63089529,0.53584329,0.51632411,0.43487934,0.37260763,0.29116286,0.232849,0.21260034,0.15719045,0.13819743,0.12324142,0.071989607,0.06474752,0.071351695,0.025029342,-0.038730827,-0.10318944,-0.11819822,-0.20190285,-0.30581578,-0.37846947,-0.47266627,-0.56849278,-0.66525054,-0.69491113,-0.79320547,-0.89050646,-0.9813197,-1.0601663,-1.1388421,-1.2066377,-1.2508104,-1.2589434,-1.251245,-1.2418858,-1.2592383,-1.2243006,-1.1543165,-1.1281171,-1.1046028,-1.0435899,-0.99531962,-0.94273455,-0.90523587,-0.94742188,-0.92561491,-0.92395417,-0.95990075,-0.98788507,-1.017468,-1.0103439,-1.0833546,-1.0780154,-1.1288,-1.1869105,-1.2266598,-1.189487,-1.198753,-1.1907132,-1.1474717,-1.1057203,-1.0608026,-0.97296941,-0.87787239,-0.78148713,-0.68413957,-0.63492255,-0.51775471,-0.44458883,-0.34598407,-0.26654771,-0.14914705,-0.042657634,0.040969384,0.056614528,0.082871363,0.16328554,0.19183327,0.17249258,0.14863219,0.18584217,0.21810407,0.2155369,0.23540841,0.27399821,0.39404365,0.4756576,0.49596214,0.57548696,0.62710197,0.71609769,0.80051318,0.86086649,0.89723524,0.93723435,1.0311611,1.0991243,1.1369909,1.1129535,1.1408975,1.2052055,1.246167,1.2653509,1.3038569,1.2847847,1.2847847,1.2657762,1.2657762,1.2468375,1.2087009,1.2091898,1.1904917,1.153367,1.153367,1.0973643,1.1166367,1.1359479,1.155287,1.0984321,1.0996474,1.1025126,1.1041562,1.1041562,1.0690618,1.0711059,1.0562104,1.058672,0.9989085,0.97029092,0.95725796,0.89811994,0.84594618,0.7808481,0.75471078,0.7068146,0.67132899,0.62439201,0.49092403,0.44129571,0.40477175,0.34238829,0.27303126,0.13058595,0.049195502,-0.08745117,-0.17958368,-0.27677603,-0.40117666,-0.50086789,-0.60597593,-0.64909321,-0.75317687,-0.85469957,-0.9709672,-1.0556031,-1.1442123,-1.2264114,-1.3202512,-1.4109558,-1.4699355,-1.5422633,-1.593141,-1.671553,-1.7285771,-1.7380294,-1.7874326,-1.8161154,-1.8740086,-1.8944032,-1.8971038:1
-1.6736877,-1.6714786,-1.6601836,-1.6349352,-1.6061423,-1.5587656,-1.5561697,-1.5173298,-1.490072,-1.4263332,-1.4176966,-1.3623822,-1.2979944,-1.2818444,-1.2060368,-1.1412621,-1.0662782,-1.0146831,-0.90716203,-0.79243965,-0.67688108,-0.60999713,-0.4868503,-0.36015896,-0.28891926,-0.14826204,-0.02821042,0.096533937,0.1579763,0.27265624,0.31271921,0.4223632,0.46486614,0.5272171,0.59648361,0.67627257,0.67078731,0.72459525,0.78778866,0.80863139,0.83146229,0.88203274,0.9439968,0.957592,0.96659806,1.0130124,1.0404375,1.0302133,1.0633757,1.0925655,1.0917206,1.1065289,1.0754508,1.090339,1.090339,1.0898048,1.07434,1.0589126,1.0739493,1.0585657,1.0736698,1.0583335,1.0583335,1.0735025,1.0735025,1.0582175,1.0734464,1.0582175,1.0583335,1.0583335,1.0585657,1.0435289,1.0439495,1.0411064,1.0035384,0.96459241,0.99100527,0.96562706,0.92333504,0.89524104,0.87292309,0.82733368,0.79610578,0.77927185,0.75482844,0.70519279,0.65968575,0.63379209,0.57230105,0.52155712,0.45144692,0.42107894,0.34235832,0.30290191,0.22608959,0.18530899,0.11450611,0.021887013,-0.019686118,-0.096679409,-0.20235329,-0.29578363,-0.33553459,-0.44640043,-0.54097899,-0.63907711,-0.68540538,-0.78010875,-0.87728329,-0.92348675,-1.0109264,-1.0898167,-1.164551,-1.1987231,-1.2494446,-1.3083908,-1.347343,-1.3725165,-1.4187949,-1.4623649,-1.4689048,-1.4802872,-1.5047118,-1.5112892,-1.5136106,-1.5162565,-1.5004934,-1.4978724,-1.4955885,-1.5047118,-1.4955885,-1.4840563,-1.4639,-1.4487984,-1.4024077,-1.3776211,-1.3394053,-1.2810082,-1.2176688,-1.1966388,-1.1248375,-1.0448613,-0.97395861,-0.92840414,-0.85522994,-0.76271068,-0.71037921,-0.60289563,-0.50844187,-0.39757603,-0.37352576,-0.259702,-0.1745089,-0.064479265,-0.015118191,0.063297897,0.15073751,0.1919487,0.28311131,0.3534499,0.38857926,0.43367069,0.46013971,0.52634096,0.58704073,0.62351426,0.65848511,0.70812076,0.73256416,0.76510378,0.81199119,0.84211954,0.83319835,0.86141841,0.90370918,0.92923216,0.94915881,0.98795873,1.0067297,1.0432294,1.0430484,1.0582175,1.0735025,1.0888388,1.1042225,1.0890535,1.0893755,1.0893755,1.0898048,1.0898048,1.1208305,1.1208305,1.1058662,1.1058662,1.1065289,1.0917206,1.1376857,1.1228761,1.1081514,1.1091062,1.0945562,1.0956994,1.0956994,1.067075,1.0340748,1.0164371,1.0213383,0.96886829,0.92798284,0.91321321,0.86584031,0.84570274,0.82168243,0.78360888,0.71986632,0.69987103,0.67144629,0.59201927,0.5711728,0.50886926,0.46657849,0.40698077,0.2877691,0.17498747,0.10273683,0.0025170043,-0.11764694,-0.25830416,-0.31430496,-0.45633505,-0.5872199,-0.64647815,-0.771547,-0.89172343,-0.98577781,-1.0191761,-1.113867,-1.1933814,-1.2699129,-1.3035358,-1.3684353,-1.4081239,-1.4331102,-1.4962999,-1.5221473,-1.5602384,-1.5767753,-1.6097242,-1.6362332,-1.6611571,-1.6625175:2
-2.1308119,-2.1044297,-2.0747549,-2.0254059,-1.9449096,-1.8604048,-1.7906455,-1.7175116,-1.6573235,-1.6164618,-1.5470092,-1.4707872,-1.3701873,-1.2520402,-1.1926496,-1.0849735,-0.97944484,-0.86800574,-0.75139245,-0.70308649,-0.55749372,-0.43298624,-0.33152736,-0.21141691,-0.055230368,0.017494437,0.10114023,0.16723882,0.23836229,0.30684549,0.31316494,0.36392506,0.42496399,0.58858254,0.77480589,0.84493338,0.95977354,1.0869601,1.1878914,1.3536041,1.4603415,1.5082752,1.6158327,1.6815529,1.7992481,1.7421767,1.7633376,1.7353991,1.6579848,1.5728032,1.4869159,1.5080769,1.4934869,1.4576419,1.4203224,1.3493789,1.3046376,1.269715,1.1107205,1.0777325,1.0187448,0.95605754,0.93487409,0.86680809,0.7387973,0.66401509,0.61010957,0.58238784,0.47752996,0.3707742,0.34010544,0.38271366,0.42728113,0.47483243,0.52340426,0.54681281,0.45512761,0.28445542,0.17605333,-0.030872876,-0.14051227,-0.26953949,-0.38954769,-0.44824291,-0.6084788,-0.68541657,-0.76793755,-0.83847407,-0.90633146,-0.9116079,-0.94267341,-1.0031683,-1.0318411,-0.97494556,-0.97210283,-0.96764445,-0.96118184,-0.95471923,-0.89545137,-0.83454742,-0.74374367,-0.6748228,-0.5381468,-0.43478595,-0.35310348,-0.3108102,-0.22334001,-0.13206588,-0.055169014,-0.0087854771,0.014569902,0.061321562,0.10764375,0.15296382,0.17171765,0.16445744,0.096415985,0.051627648,0.0044669621,-0.016270651,0.02164605,0.039275066,0.10717337,0.17122682,0.18079803,0.16856815,0.21680253,0.067906879,-0.0013412057,-0.046436311,-0.10899682,-0.10032547,-0.057234595,0.0092730164,0.042833592,0.15658369,0.21619513,0.13926145,0.082038724,0.028619942,-0.057602718,-0.14151438,-0.19039298,-0.28514383,-0.44503205,-0.56303602,-0.64253021,-0.68069232,-0.81464831,-0.91293723,-1.005827,-1.0642359,-1.100537,-1.1040137,-1.050963,-1.0241923,-0.96566067,-0.90422498,-0.93398161,-0.86900785,-0.80096639,-0.78707996,-0.71278041,-0.67443423,-0.59541042,-0.54174623,-0.41476414,-0.32085179,-0.19033162,-0.12008142,0.020868901,0.19339603,0.39455905,0.48916675,0.52280094,0.55169453,0.50151115,0.43351264,0.41400415,0.34541255,0.27997863,0.3379601,0.400312,0.5065892,0.62100806,0.64901816,0.80490611,0.85446164,1.0113047,1.1292984,1.1695752,1.2021398,1.2884136,1.364746,1.4576419,1.4872799,1.55263,1.5678478,1.5466889,1.5756541,1.5339396,1.5339396,1.5710607,1.5507117,1.4998677,1.546149,1.5148196,1.4244863,1.3997238,1.3559744,1.2704492,1.2357801,1.1191812,1.0180413,0.84441392,0.76265169,0.64695462,0.58123439,0.53766495,0.46919606,0.44968143,0.3819856,0.32564023,0.2656709,0.19679094,0.10404432,0.0063689325,-0.066805801,-0.19182457,-0.317825,-0.48446215,-0.59547178,-0.75323307,-0.8224607,-0.95676436,-1.0539898,-1.1705213,-1.2654767,-1.3171162,-1.4267147,-1.5417737,-1.6315957,-1.7167345,-1.7357337,-1.8110559,-1.8595868,-1.9444597,-2.0030322,-2.0340977,-2.0800313,-2.103448:0
-1.8803376,-1.8626622,-1.8496866,-1.8331789,-1.797872,-1.7399271,-1.6948264,-1.6898347,-1.6367794,-1.5775501,-1.511709,-1.4754241,-1.4178588,-1.3341379,-1.2433674,-1.1787377,-1.093674,-0.98248412,-0.869966,-0.81819511,-0.69896298,-0.5845912,-0.46743165,-0.37006385,-0.30428111,-0.16827853,-0.050126473,0.080081618,0.10749231,0.22941881,0.31280687,0.42249635,0.4664746,0.53040953,0.5869211,0.67234379,0.70386755,0.74434722,0.81488962,0.88015421,0.90129022,0.92406825,0.9943377,1.0600329,1.0912238,1.1375841,1.1482725,1.1865877,1.2193433,1.235905,1.2525864,1.2343418,1.2511371,1.2680447,1.2850604,1.3021796,1.3194011,1.3194011,1.3367203,1.3541315,1.3533871,1.3533871,1.3345076,1.3134446,1.271047,1.2653022,1.2323597,1.215617,1.153832,1.1446981,1.1076163,0.98301729,0.92000481,0.85057606,0.81124945,0.73315087,0.66573779,0.58090768,0.55607896,0.44835406,0.37808022,0.3135746,0.27035532,0.22736812,0.16867742,0.121402,0.10610572,0.1095649,0.095275724,0.081453612,0.068083966,0.042614499,0.048700899,0.036936778,0.025537549,-0.0078719695,-0.054826283,-0.16333059,-0.25735598,-0.3056531,-0.40436371,-0.50523447,-0.60733128,-0.65854753,-0.75845498,-0.85763265,-0.93652232,-0.97204821,-1.0207394,-1.0461067,-1.0095445,-0.9943942,-0.96104307,-0.93444973,-0.91500828,-0.8547573,-0.8277115,-0.77963332,-0.71348568,-0.72433027,-0.72978906,-0.67762409,-0.7296431,-0.73781669,-0.76559227,-0.70466989,-0.75492283,-0.76004591,-0.80317616,-0.80552606,-0.84416083,-0.89286663,-0.91286272,-0.9588975,-1.0082309,-1.0411734,-1.0604981,-1.0863032,-1.1084887,-1.1275944,-1.127069,-1.1143707,-1.0654898,-0.98306795,-0.88730567,-0.83827877,-0.73837132,-0.63677077,-0.53442584,-0.48326797,-0.40293333,-0.30466059,-0.20265136,-0.14804891,-0.084426328,-0.042317782,-0.069217626,-0.059321753,-0.049075583,-0.027488568,-0.034333943,-0.010251066,0.0024909656,0.039709958,0.098457583,0.1886881,0.20704509,0.271396,0.36465803,0.50084452,0.52555355,0.57806298,0.67388802,0.78164795,0.82517227,0.9237413,0.98551899,1.0548062,1.0990223,1.137282,1.1871014,1.2353431,1.2658962,1.2835264,1.3155653,1.3264012,1.367237,1.3689753,1.4053215,1.3873849,1.369511,1.369511,1.3517013,1.3339617,1.316298,1.3345076,1.3169227,1.2994225,1.2820113,1.2646935,1.2474721,1.2485785,1.2498001,1.2328939,1.1994187,1.1551062,1.1276926,1.0736083,1.0771244,1.0100018,0.95566498,0.89650576,0.87402695,0.84358473,0.77046327,0.67268825,0.65809111,0.56810872,0.50750015,0.40228425,0.3385157,0.25736808,0.13488841,0.0076724332,-0.051950933,-0.15813453,-0.27001044,-0.40618817,-0.45353656,-0.58682434,-0.7049618,-0.83496555,-0.9413243,-1.0009477,-1.0965932,-1.1842694,-1.2816664,-1.3258622,-1.3949873,-1.4723882,-1.5259252,-1.5590136,-1.6207679,-1.6589794,-1.7094659,-1.7327752,-1.7758617,-1.8144965,-1.8485336,-1.8640342,-1.8798851:1
-1.80105,-1.7989155,-1.7783754,-1.7594283,-1.7011332,-1.6717769,-1.6207822,-1.5645597,-1.5348012,-1.4708916,-1.4192782,-1.3406595,-1.2729296,-1.2451508,-1.150168,-1.0493387,-0.93837852,-0.83096026,-0.7760679,-0.66591199,-0.54655321,-0.43149426,-0.29560127,-0.24858161,-0.11061604,0.0017825862,0.10845843,0.20822671,0.2646735,0.37170509,0.45202363,0.56011625,0.62064323,0.62864275,0.66614866,0.75039118,0.79287437,0.83873245,0.90949085,0.95618724,1.0173422,1.0549796,1.0901252,1.1049813,1.1545158,1.1671153,1.2074795,1.230963,1.2116911,1.1898192,1.2066984,1.2237183,1.2408742,1.2408742,1.2022145,1.219505,1.2175949,1.2351453,1.2334934,1.2319776,1.2305964,1.1920821,1.1728752,1.1707655,1.1699504,1.147483,1.1059541,1.0867874,1.0630054,1.0387299,1.014009,0.98889993,0.9637042,0.90008073,0.84750842,0.8206933,0.77496823,0.76633146,0.7292973,0.7389255,0.64440362,0.60506487,0.57555849,0.5026904,0.46104243,0.41910987,0.34225284,0.3113467,0.2689161,0.19044277,0.13066903,0.051539899,0.021827808,-0.0083018925,-0.10738344,-0.18521335,-0.21323954,-0.28830085,-0.36243414,-0.42649842,-0.4922486,-0.53736582,-0.60353361,-0.68883407,-0.75297569,-0.79724222,-0.82214407,-0.86590019,-0.93237732,-0.95735652,-0.98171703,-1.0088152,-1.0408628,-1.0968224,-1.1193423,-1.1280966,-1.1558135,-1.1638099,-1.1758123,-1.2059884,-1.2113245,-1.2372781,-1.2408046,-1.2664644,-1.2671294,-1.2662478,-1.2652115,-1.2381288,-1.2333495,-1.2271318,-1.2132424,-1.2090818,-1.199848,-1.1837314,-1.1484667,-1.1125987,-1.1067522,-1.0706213,-1.0197968,-0.98361947,-0.94840113,-0.93830118,-0.90520182,-0.8553517,-0.78692573,-0.72151582,-0.67884239,-0.65052233,-0.58509696,-0.52007372,-0.47528131,-0.45334912,-0.40594279,-0.3449255,-0.27300399,-0.24548821,-0.19888617,-0.12411873,-0.067555939,-0.021278699,0.0077064441,0.064733243,0.14070711,0.18102956,0.25637546,0.2670879,0.34100775,0.38084762,0.45224171,0.50960105,0.53805258,0.57553374,0.60174566,0.65700922,0.69248431,0.72814037,0.78133909,0.87011807,0.89514985,0.91998675,0.93861983,0.96327731,1.0060389,1.0254546,1.0493604,1.0720675,1.1320021,1.1517008,1.1526242,1.15371,1.1728752,1.1741651,1.2319776,1.2334934,1.2351453,1.2721531,1.3108129,1.3301281,1.331749,1.3334705,1.352713,1.3180004,1.3372073,1.3221966,1.2818386,1.258055,1.2455855,1.1959117,1.1722457,1.1461095,1.1262948,1.048089,1.0194194,0.94880949,0.87262063,0.87873628,0.83070044,0.73841664,0.67610941,0.58709687,0.52227006,0.40556388,0.29720059,0.16860956,0.13815505,-0.0066005234,-0.11641617,-0.23012949,-0.34594633,-0.41463524,-0.5509613,-0.66591199,-0.78465208,-0.88645583,-0.93837852,-1.0314125,-1.150168,-1.2283691,-1.3162062,-1.3399326,-1.4172675,-1.4875805,-1.5514901,-1.5926323,-1.6200707,-1.6880945,-1.717157,-1.7590571,-1.7965491,-1.7985443,-1.80105:2
